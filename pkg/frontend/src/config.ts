/**
 * Zoo configuration: INI files in the engine's key-value style, one training
 * job per section.  Model hyperparameters are keyed exactly like the
 * published tables and are pre-populated per (model, dataset); unknown keys
 * are rejected rather than ignored.
 */

import * as fs from "fs";

export class ConfigError extends Error {}

export type HyperValue = number | string;
export type Hyper = Record<string, HyperValue>;

export const MODELS = [
  "ocsvm",
  "dae",
  "deepsvdd",
  "memae",
  "dagmm",
  "som-dagmm",
  "dsebm-e",
  "dsebm-r",
  "drocc",
  "alad",
  "neutralad",
  "duad",
] as const;
export type ModelName = (typeof MODELS)[number];

const COMMON_LR = 1e-4;

/** Hyperparameter defaults per model and dataset, keyed as the tables. */
const TABLE: Record<string, Record<string, Hyper>> = {
  ocsvm: {
    arrhythmia: { nu: 0.4 },
    thyroid: { nu: 0.05 },
    kddcup10: { nu: 0.25 },
    "nsl-kdd": { nu: 0.4 },
    ids2018: { nu: 0.01 },
    default: { nu: 0.5 },
  },
  dae: {
    arrhythmia: { batch: 128, epoch: 10000, lat_dim: 3, learning_rate: COMMON_LR },
    thyroid: { batch: 128, epoch: 5000, lat_dim: 2, learning_rate: COMMON_LR },
    kddcup10: { batch: 1024, epoch: 100, lat_dim: 2, learning_rate: COMMON_LR },
    "nsl-kdd": { batch: 1024, epoch: 100, lat_dim: 2, learning_rate: COMMON_LR },
    ids2018: { batch: 1024, epoch: 100, lat_dim: 2, learning_rate: COMMON_LR },
    default: { batch: 128, epoch: 200, lat_dim: 2, learning_rate: COMMON_LR },
  },
  deepsvdd: {
    arrhythmia: { batch: 128, n_output_features: 64, epoch: 200, learning_rate: COMMON_LR },
    thyroid: { batch: 128, n_output_features: 1, epoch: 200, learning_rate: COMMON_LR },
    kddcup10: { batch: 1024, n_output_features: 29, epoch: 100, learning_rate: COMMON_LR },
    "nsl-kdd": { batch: 1024, n_output_features: 31, epoch: 100, learning_rate: COMMON_LR },
    ids2018: { batch: 1024, n_output_features: 16, epoch: 100, learning_rate: COMMON_LR },
    default: { batch: 128, n_output_features: 8, epoch: 200, learning_rate: COMMON_LR },
  },
  memae: {
    arrhythmia: { batch: 128, epoch: 10000, lat_dim: 3, mem_dim: 50, weight_decay: 1e-4, learning_rate: COMMON_LR },
    thyroid: { batch: 128, epoch: 20000, lat_dim: 3, mem_dim: 50, weight_decay: 1e-4, learning_rate: COMMON_LR },
    kddcup10: { batch: 1024, epoch: 200, lat_dim: 3, mem_dim: 50, weight_decay: 1e-4, learning_rate: COMMON_LR },
    "nsl-kdd": { batch: 1024, epoch: 200, lat_dim: 3, mem_dim: 50, weight_decay: 1e-4, learning_rate: COMMON_LR },
    ids2018: { batch: 1024, epoch: 50, lat_dim: 3, mem_dim: 250, weight_decay: 1e-4, learning_rate: COMMON_LR },
    default: { batch: 128, epoch: 200, lat_dim: 3, mem_dim: 50, weight_decay: 1e-4, learning_rate: COMMON_LR },
  },
  dagmm: {
    arrhythmia: { batch: 128, epoch: 10000, lat_dim: 2, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    thyroid: { batch: 128, epoch: 5000, lat_dim: 2, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    kddcup10: { batch: 1024, epoch: 200, lat_dim: 1, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    "nsl-kdd": { batch: 1024, epoch: 200, lat_dim: 1, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    ids2018: { batch: 1024, epoch: 100, lat_dim: 1, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    default: { batch: 128, epoch: 200, lat_dim: 2, learning_rate: COMMON_LR, weight_decay: 1e-4 },
  },
  "som-dagmm": {
    arrhythmia: { batch: 128, epoch: 10000, lat_dim: 2, learning_rate: COMMON_LR },
    thyroid: { batch: 128, epoch: 5000, lat_dim: 1, learning_rate: COMMON_LR },
    kddcup10: { batch: 1024, epoch: 100, lat_dim: 2, learning_rate: COMMON_LR },
    "nsl-kdd": { batch: 1024, epoch: 100, lat_dim: 2, learning_rate: COMMON_LR },
    ids2018: { batch: 1024, epoch: 100, lat_dim: 2, learning_rate: COMMON_LR },
    default: { batch: 128, epoch: 200, lat_dim: 2, learning_rate: COMMON_LR },
  },
  "dsebm-e": {
    arrhythmia: { batch: 128, epoch: 10000, lat_dim: 2, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    thyroid: { batch: 128, epoch: 5000, lat_dim: 2, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    kddcup10: { batch: 1024, epoch: 100, lat_dim: 512, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    "nsl-kdd": { batch: 1024, epoch: 100, lat_dim: 512, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    ids2018: { batch: 1024, epoch: 100, lat_dim: 512, learning_rate: COMMON_LR, weight_decay: 1e-4 },
    default: { batch: 128, epoch: 200, lat_dim: 16, learning_rate: COMMON_LR, weight_decay: 1e-4 },
  },
  drocc: {
    arrhythmia: { batch: 256, threshold: 70, radius: 16, mu: 0.5, nu: 0.1, learning_rate: 0.01, only_ce_epochs: 50, gradient_ascent_steps: 50 },
    thyroid: { batch: 256, threshold: 95, radius: 0.5, mu: 1.0, nu: 0.01, learning_rate: COMMON_LR, only_ce_epochs: 50, gradient_ascent_steps: 50 },
    kddcup10: { batch: 1024, threshold: 61, radius: 16, mu: 0.5, nu: 0.1, learning_rate: 0.01, only_ce_epochs: 50, gradient_ascent_steps: 50 },
    // batch -1 published for NSL-KDD: interpreted as full-batch, flagged at load
    "nsl-kdd": { batch: -1, threshold: 35, radius: 16, mu: 0.5, nu: 0.1, learning_rate: 0.01, only_ce_epochs: 50, gradient_ascent_steps: 50 },
    ids2018: { batch: 100, threshold: 2, radius: 8.124, mu: 1.0, nu: 0.01, learning_rate: COMMON_LR, only_ce_epochs: 50, gradient_ascent_steps: 50 },
    default: { batch: 256, threshold: 50, radius: 8, mu: 1.0, nu: 0.01, learning_rate: COMMON_LR, only_ce_epochs: 50, gradient_ascent_steps: 50 },
  },
  alad: {
    arrhythmia: { batch: 128, epoch: 10000, lat_dim: 32, weight_decay: 1e-4, learning_rate: COMMON_LR },
    thyroid: { batch: 128, epoch: 20000, lat_dim: 32, weight_decay: 1e-4, learning_rate: COMMON_LR },
    kddcup10: { batch: 1024, epoch: 100, lat_dim: 32, weight_decay: 1e-4, learning_rate: COMMON_LR },
    "nsl-kdd": { batch: 1024, epoch: 200, lat_dim: 32, weight_decay: 1e-4, learning_rate: COMMON_LR },
    ids2018: { batch: 1024, epoch: 150, lat_dim: 32, weight_decay: 1e-4, learning_rate: COMMON_LR },
    default: { batch: 128, epoch: 200, lat_dim: 32, weight_decay: 1e-4, learning_rate: COMMON_LR },
  },
  neutralad: {
    arrhythmia: { batch: 128, epoch: 200, lat_dim: 32, learning_rate: COMMON_LR, weight_decay: 1e-5, transformation_type: "residual" },
    thyroid: { batch: 128, epoch: 580, lat_dim: 24, learning_rate: COMMON_LR, weight_decay: 1e-5, transformation_type: "residual" },
    kddcup10: { batch: 1024, epoch: 40, lat_dim: 32, learning_rate: COMMON_LR, weight_decay: 1e-5, transformation_type: "multiplicative" },
    "nsl-kdd": { batch: 1024, epoch: 40, lat_dim: 32, learning_rate: COMMON_LR, weight_decay: 1e-5, transformation_type: "multiplicative" },
    ids2018: { batch: 1024, epoch: 25, lat_dim: 32, learning_rate: COMMON_LR, weight_decay: 1e-5, transformation_type: "multiplicative" },
    default: { batch: 128, epoch: 200, lat_dim: 24, learning_rate: COMMON_LR, weight_decay: 1e-5, transformation_type: "residual" },
  },
  duad: {
    arrhythmia: { batch: 128, epoch: 5000, lat_dim: 3, r: 10, p0: 35, ps: 30, clusters: 8, learning_rate: COMMON_LR },
    thyroid: { batch: 128, epoch: 5000, lat_dim: 2, r: 10, p0: 35, ps: 30, clusters: 8, learning_rate: COMMON_LR },
    kddcup10: { batch: 1024, epoch: 100, lat_dim: 2, r: 10, p0: 35, ps: 30, clusters: 10, learning_rate: COMMON_LR },
    "nsl-kdd": { batch: 1024, epoch: 100, lat_dim: 2, r: 10, p0: 35, ps: 30, clusters: 10, learning_rate: COMMON_LR },
    ids2018: { batch: 1024, epoch: 100, lat_dim: 2, r: 10, p0: 35, ps: 30, clusters: 15, learning_rate: COMMON_LR },
    default: { batch: 128, epoch: 200, lat_dim: 2, r: 10, p0: 35, ps: 30, clusters: 8, learning_rate: COMMON_LR },
  },
};
// dsebm-r shares the dsebm table
TABLE["dsebm-r"] = TABLE["dsebm-e"];

/** Extra tunables each model accepts beyond its table columns. */
const EXTRA_KEYS: Record<string, string[]> = {
  ocsvm: ["gamma", "tol", "max_iter"],
  dae: [],
  deepsvdd: [],
  memae: ["shrink_threshold", "entropy_weight"],
  dagmm: ["components", "energy_weight", "cov_diag_weight"],
  "som-dagmm": ["components", "energy_weight", "cov_diag_weight", "som_side", "som_epochs"],
  "dsebm-e": ["noise_std", "hidden_dim"],
  "dsebm-r": ["noise_std", "hidden_dim"],
  drocc: ["gamma_annulus", "epoch"],
  alad: ["hidden_dim"],
  neutralad: ["num_transforms", "temperature"],
  duad: [],
};

export interface ZooJob {
  section: string;
  model: ModelName;
  dataset: string;
  cacheDir: string;
  splitsDir: string;
  outDir: string;
  runs: number;
  seed: number;
  hyper: Hyper;
  warnings: string[];
}

const JOB_KEYS = new Set([
  "model",
  "dataset",
  "cache_dir",
  "splits_dir",
  "out_dir",
  "runs",
  "seed",
]);

export function defaultsFor(model: ModelName, dataset: string): Hyper {
  const table = TABLE[model];
  return { ...(table[dataset] ?? table["default"]) };
}

export function parseIni(text: string): Map<string, Map<string, string>> {
  const sections = new Map<string, Map<string, string>>();
  let current: Map<string, string> | null = null;
  text.split("\n").forEach((rawLine, lineno) => {
    const line = rawLine.trim();
    if (!line || line.startsWith("#") || line.startsWith(";")) return;
    const header = line.match(/^\[(.+)\]$/);
    if (header) {
      current = new Map();
      sections.set(header[1].trim(), current);
      return;
    }
    const eq = line.indexOf("=");
    if (eq < 0 || !current) {
      throw new ConfigError(`line ${lineno + 1}: expected 'key = value' inside a section`);
    }
    current.set(line.slice(0, eq).trim(), line.slice(eq + 1).trim());
  });
  return sections;
}

function coerce(value: string): HyperValue {
  const num = Number(value);
  return Number.isNaN(num) || value === "" ? value : num;
}

export function parseZooConfig(file: string): ZooJob[] {
  if (!fs.existsSync(file)) throw new ConfigError(`config file not found: ${file}`);
  const sections = parseIni(fs.readFileSync(file, "utf-8"));
  if (!sections.size) throw new ConfigError(`${file}: no sections`);
  const jobs: ZooJob[] = [];
  for (const [section, entries] of sections) {
    const model = entries.get("model") as ModelName | undefined;
    if (!model) throw new ConfigError(`[${section}] needs a model`);
    if (!MODELS.includes(model)) {
      throw new ConfigError(`[${section}] unknown model '${model}'; known: ${MODELS.join(", ")}`);
    }
    const dataset = entries.get("dataset");
    if (!dataset) throw new ConfigError(`[${section}] needs a dataset name`);
    const hyper = defaultsFor(model, dataset);
    const allowed = new Set([...Object.keys(hyper), ...(EXTRA_KEYS[model] ?? [])]);
    const warnings: string[] = [];
    for (const [key, value] of entries) {
      if (JOB_KEYS.has(key)) continue;
      if (!allowed.has(key)) {
        throw new ConfigError(
          `[${section}] unknown hyperparameter '${key}' for ${model} ` +
            `(accepted: ${[...allowed].sort().join(", ")})`
        );
      }
      hyper[key] = coerce(value);
    }
    if (model === "drocc" && hyper["batch"] === -1) {
      warnings.push(
        "published batch size -1 interpreted as full-batch training (flagged, not normalized)"
      );
    }
    jobs.push({
      section,
      model,
      dataset,
      cacheDir: entries.get("cache_dir") ?? "cache",
      splitsDir: entries.get("splits_dir") ?? "",
      outDir: entries.get("out_dir") ?? `results/${dataset}/${model}/scores`,
      runs: Number(entries.get("runs") ?? "1"),
      seed: Number(entries.get("seed") ?? "0"),
      hyper,
      warnings,
    });
    const job = jobs[jobs.length - 1];
    if (!job.splitsDir) throw new ConfigError(`[${section}] needs splits_dir`);
    if (!Number.isInteger(job.runs) || job.runs < 1) {
      throw new ConfigError(`[${section}] runs must be a positive integer`);
    }
  }
  return jobs;
}
