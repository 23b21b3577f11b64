/** Synthetic caches and split files in the engine's on-disk formats. */

import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { Rand } from "../src/rng";

export function tmpDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

export interface SyntheticData {
  dir: string;
  name: string;
  n: number;
  d: number;
  labels: Uint8Array;
  trainIdx: Int32Array;
  testIdx: Int32Array;
  splitsDir: string;
}

/**
 * Writes a cache (column-major f64 + sidecar) holding a normal blob and a
 * shifted anomaly blob, plus protocol-style split files: train = half the
 * normals, test = the rest plus every anomaly.
 */
export function makeSynthetic(
  nNormal = 160,
  nAnomaly = 24,
  d = 5,
  seed = 7,
  name = "synthetic"
): SyntheticData {
  const dir = tmpDir("zoo-cache-");
  const n = nNormal + nAnomaly;
  const rand = new Rand(seed);
  const features = new Float64Array(n * d);
  const labels = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    const anomalous = i >= nNormal;
    labels[i] = anomalous ? 1 : 0;
    for (let j = 0; j < d; j++) {
      const base = anomalous ? (rand.uniform() < 0.5 ? 0.05 : 0.95) : 0.5;
      features[i * d + j] = Math.min(Math.max(base + 0.08 * rand.normal(), 0), 1);
    }
  }
  // column-major with labels in the last column
  const matrix = new Float64Array(n * (d + 1));
  for (let j = 0; j < d; j++) {
    for (let i = 0; i < n; i++) matrix[j * n + i] = features[i * d + j];
  }
  for (let i = 0; i < n; i++) matrix[d * n + i] = labels[i];
  fs.writeFileSync(path.join(dir, `${name}.features.bin`), Buffer.from(matrix.buffer));
  const rho = nAnomaly / n;
  fs.writeFileSync(
    path.join(dir, `${name}.meta.json`),
    JSON.stringify({
      format_version: 1,
      layout: "column_major_float64_labels_last",
      name,
      n_samples: n,
      n_features: d,
      anomaly_ratio: rho,
      n_dropped_rows: 0,
      feature_names: Array.from({ length: d }, (_, j) => `f${j}`),
      scale_min: new Array(d).fill(0),
      scale_max: new Array(d).fill(1),
    })
  );

  const half = Math.floor(nNormal / 2);
  const trainIdx = new Int32Array(half);
  for (let i = 0; i < half; i++) trainIdx[i] = i;
  const testIdx = new Int32Array(n - half);
  for (let i = half; i < n; i++) testIdx[i - half] = i;
  const splitsDir = path.join(dir, "splits");
  fs.mkdirSync(splitsDir);
  for (const run of [0, 1]) {
    fs.writeFileSync(
      path.join(splitsDir, `run-${run}.train.csv`),
      "# role: train\n" + Array.from(trainIdx).join("\n") + "\n"
    );
    fs.writeFileSync(
      path.join(splitsDir, `run-${run}.test.csv`),
      "# role: test\n" + Array.from(testIdx).join("\n") + "\n"
    );
  }
  return { dir, name, n, d, labels, trainIdx, testIdx, splitsDir };
}

/** Rank-based AUROC used to sanity-check detector quality in tests. */
export function auroc(scores: ArrayLike<number>, labels: ArrayLike<number>): number {
  const order = Array.from({ length: scores.length }, (_, i) => i).sort(
    (a, b) => scores[a] - scores[b]
  );
  let rankSum = 0;
  let nPos = 0;
  // midranks for ties
  let i = 0;
  const ranks = new Float64Array(scores.length);
  while (i < order.length) {
    let j = i;
    while (j + 1 < order.length && scores[order[j + 1]] === scores[order[i]]) j++;
    const rank = (i + j) / 2 + 1;
    for (let t = i; t <= j; t++) ranks[order[t]] = rank;
    i = j + 1;
  }
  for (let t = 0; t < scores.length; t++) {
    if (labels[t] === 1) {
      rankSum += ranks[t];
      nPos++;
    }
  }
  const nNeg = scores.length - nPos;
  return (rankSum - (nPos * (nPos + 1)) / 2) / (nPos * nNeg);
}
