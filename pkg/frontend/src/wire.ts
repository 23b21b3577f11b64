/**
 * The wire contracts shared with the evaluation engine: the binary feature
 * cache with its JSON sidecar, exported split-index CSVs, and the
 * `index,score,label` score-file format the zoo emits.
 */

import * as fs from "fs";
import * as path from "path";

export interface DatasetCache {
  name: string;
  nSamples: number;
  nFeatures: number;
  anomalyRatio: number;
  featureNames: string[];
  /** Row-major N x D features, already min-max scaled by the engine. */
  features: Float64Array;
  labels: Uint8Array;
}

export class WireError extends Error {}

export function readCache(dir: string, name: string): DatasetCache {
  const metaPath = path.join(dir, `${name}.meta.json`);
  const binPath = path.join(dir, `${name}.features.bin`);
  if (!fs.existsSync(metaPath)) throw new WireError(`cache sidecar not found: ${metaPath}`);
  if (!fs.existsSync(binPath)) throw new WireError(`cache matrix not found: ${binPath}`);
  const meta = JSON.parse(fs.readFileSync(metaPath, "utf-8"));
  if (meta.format_version !== 1) {
    throw new WireError(`unsupported cache version ${meta.format_version}`);
  }
  const n: number = meta.n_samples;
  const d: number = meta.n_features;
  const raw = fs.readFileSync(binPath);
  const expected = n * (d + 1) * 8;
  if (raw.byteLength !== expected) {
    throw new WireError(
      `cache matrix size mismatch: expected ${expected} bytes, got ${raw.byteLength}`
    );
  }
  // Column-major with the labels as the final column.
  const columns = new Float64Array(raw.buffer, raw.byteOffset, n * (d + 1));
  const features = new Float64Array(n * d);
  for (let j = 0; j < d; j++) {
    for (let i = 0; i < n; i++) {
      features[i * d + j] = columns[j * n + i];
    }
  }
  const labels = new Uint8Array(n);
  for (let i = 0; i < n; i++) labels[i] = columns[d * n + i];
  return {
    name: meta.name,
    nSamples: n,
    nFeatures: d,
    anomalyRatio: meta.anomaly_ratio,
    featureNames: meta.feature_names,
    features,
    labels,
  };
}

export function gatherRows(cache: DatasetCache, indices: Int32Array): Float64Array {
  const d = cache.nFeatures;
  const out = new Float64Array(indices.length * d);
  for (let r = 0; r < indices.length; r++) {
    out.set(cache.features.subarray(indices[r] * d, (indices[r] + 1) * d), r * d);
  }
  return out;
}

export function readIndices(file: string): Int32Array {
  if (!fs.existsSync(file)) throw new WireError(`index file not found: ${file}`);
  const values: number[] = [];
  for (const rawLine of fs.readFileSync(file, "utf-8").split("\n")) {
    const line = rawLine.trim();
    if (!line || line.startsWith("#")) continue;
    const value = Number(line);
    if (!Number.isInteger(value)) throw new WireError(`${file}: not an index: ${line}`);
    values.push(value);
  }
  if (!values.length) throw new WireError(`${file}: no indices`);
  return Int32Array.from(values);
}

export const ORIENTATION_HIGH = "high_is_anomalous";
export const ORIENTATION_LOW = "low_is_anomalous";

export function writeScoreFile(
  file: string,
  indices: ArrayLike<number>,
  scores: ArrayLike<number>,
  labels: ArrayLike<number>,
  detector: string,
  orientation: string = ORIENTATION_HIGH
): void {
  if (indices.length !== scores.length || indices.length !== labels.length) {
    throw new WireError("indices, scores and labels must have equal length");
  }
  const lines: string[] = [`# orientation: ${orientation}`];
  if (detector) lines.push(`# detector: ${detector}`);
  lines.push("index,score,label");
  for (let i = 0; i < indices.length; i++) {
    const s = scores[i];
    if (!Number.isFinite(s)) {
      throw new WireError(`non-finite score at row ${i}: ${s}`);
    }
    lines.push(`${indices[i]},${s.toPrecision(17)},${labels[i]}`);
  }
  fs.mkdirSync(path.dirname(file), { recursive: true });
  fs.writeFileSync(file, lines.join("\n") + "\n");
}

export interface ScoreFile {
  orientation: string;
  detector: string;
  indices: Int32Array;
  scores: Float64Array;
  labels: Uint8Array;
}

export function readScoreFile(file: string): ScoreFile {
  const text = fs.readFileSync(file, "utf-8");
  let orientation = "";
  let detector = "";
  let headerSeen = false;
  const idx: number[] = [];
  const sc: number[] = [];
  const lb: number[] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const body = line.replace(/^#+\s*/, "");
      const colon = body.indexOf(":");
      if (colon > 0) {
        const key = body.slice(0, colon).trim();
        const value = body.slice(colon + 1).trim();
        if (key === "orientation") orientation = value;
        if (key === "detector") detector = value;
      }
      continue;
    }
    if (!headerSeen) {
      if (line !== "index,score,label") throw new WireError(`${file}: bad header ${line}`);
      headerSeen = true;
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== 3) throw new WireError(`${file}: bad row ${line}`);
    idx.push(Number(parts[0]));
    sc.push(Number(parts[1]));
    lb.push(Number(parts[2]));
  }
  if (!orientation) throw new WireError(`${file}: missing orientation`);
  return {
    orientation,
    detector,
    indices: Int32Array.from(idx),
    scores: Float64Array.from(sc),
    labels: Uint8Array.from(lb),
  };
}
