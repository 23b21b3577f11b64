/**
 * Cross-component round trip with the evaluation engine: the engine (Python
 * package at the repository root) exports a cache and split indices, the zoo
 * trains and emits score files, and the engine ingests them through its
 * validating score-file reader and computes metrics.
 */

import { execFileSync } from "child_process";
import * as fs from "fs";
import * as path from "path";
import { describe, expect, test } from "vitest";

import { parseZooConfig } from "../src/config";
import { executeJob } from "../src/run";
import { readIndices, readScoreFile } from "../src/wire";
import { tmpDir } from "./fixtures";

function python(script: string): string {
  return execFileSync("python3", ["-c", script], {
    cwd: path.resolve(__dirname, "..", ".."),
  })
    .toString()
    .trim();
}

function pythonAvailable(): boolean {
  try {
    python("import anobench");
    return true;
  } catch {
    return false;
  }
}

const HAVE_ENGINE = pythonAvailable();

function setupEngineExports(dir: string, runs: number): void {
  python(
    `
import numpy as np
from anobench.data import TabularDataset, save_cache
from anobench.engine import ExperimentSpec, split_for_run
from anobench.splits import SplitSpec, export_split

gen = np.random.Generator(np.random.PCG64(5))
n_norm, n_anom, d = 220, 30, 4
X = np.vstack([
    0.5 + 0.08 * gen.standard_normal((n_norm, d)),
    np.where(gen.random((n_anom, d)) < 0.5, 0.06, 0.94)
      + 0.04 * gen.standard_normal((n_anom, d)),
])
X = np.clip(X, 0, 1)
y = np.array([0] * n_norm + [1] * n_anom)
ds = TabularDataset(name="wiretest", features=X, labels=y)
save_cache(ds, ${JSON.stringify(dir)})
spec = ExperimentSpec(name="wiretest-zoo", detector="lof",
                      detector_params={"k": 5}, split=SplitSpec(seed=9),
                      n_runs=${runs})
for run in range(${runs}):
    result, _ = split_for_run(ds, spec, run)
    export_split(result, ${JSON.stringify(dir)} + "/splits", run)
print("ok")
`
  );
}

function writeZooConfig(dir: string, model: string, extra = ""): string {
  const file = path.join(dir, "zoo.cfg");
  fs.writeFileSync(
    file,
    `[wiretest-${model}]\n` +
      `model = ${model}\n` +
      `dataset = wiretest\n` +
      `cache_dir = ${dir}\n` +
      `splits_dir = ${path.join(dir, "splits")}\n` +
      `out_dir = ${path.join(dir, "results", "wiretest", model, "scores")}\n` +
      `runs = 2\nseed = 42\n` +
      extra
  );
  return file;
}

describe.skipIf(!HAVE_ENGINE)("engine round trip", () => {
  test("ocsvm scores pass engine ingest validation and evaluate", () => {
    const dir = tmpDir("zoo-integration-");
    setupEngineExports(dir, 2);
    const jobs = parseZooConfig(writeZooConfig(dir, "ocsvm", "nu = 0.1\n"));
    const failures = executeJob(jobs[0]);
    expect(failures).toEqual([]);

    const metricsJson = python(
      `
import json
from anobench.data import load_cache
from anobench.engine import ExperimentSpec, run_experiment
from anobench.splits import SplitSpec

ds = load_cache(${JSON.stringify(dir)}, "wiretest")
pattern = ${JSON.stringify(path.join(dir, "results", "wiretest", "ocsvm", "scores", "run-{run}.csv"))}
spec = ExperimentSpec(name="wiretest-ocsvm", detector="scores:" + pattern,
                      split=SplitSpec(seed=9), n_runs=2)
agg = run_experiment(ds, spec)
print(json.dumps({"f1": agg.mean("f1"), "auroc": agg.mean("auroc"),
                  "aupr": agg.mean("aupr"), "detector": agg.detector}))
`
    );
    const metrics = JSON.parse(metricsJson);
    expect(metrics.detector).toBe("ocsvm");
    expect(metrics.auroc).toBeGreaterThan(0.9); // separable blob
    expect(metrics.f1).toBeGreaterThan(0.5);
  }, 120_000);

  test("index discipline: emitted rows are exactly the exported test set", () => {
    const dir = tmpDir("zoo-integration-");
    setupEngineExports(dir, 1);
    const jobs = parseZooConfig(writeZooConfig(dir, "dae", "epoch = 20\n"));
    expect(executeJob(jobs[0], 1)).toEqual([]);
    const emitted = readScoreFile(path.join(dir, "results", "wiretest", "dae", "scores", "run-0.csv"));
    const exported = readIndices(path.join(dir, "splits", "run-0.test.csv"));
    expect(Array.from(emitted.indices).sort((a, b) => a - b)).toEqual(
      Array.from(exported).sort((a, b) => a - b)
    );
    expect(emitted.orientation).toBe("high_is_anomalous");
  }, 120_000);

  test("re-invocation with the same seed reproduces identical score files", () => {
    const dir = tmpDir("zoo-integration-");
    setupEngineExports(dir, 1);
    const jobs = parseZooConfig(writeZooConfig(dir, "deepsvdd", "epoch = 15\n"));
    expect(executeJob(jobs[0], 1)).toEqual([]);
    const first = fs.readFileSync(path.join(dir, "results", "wiretest", "deepsvdd", "scores", "run-0.csv"));
    expect(executeJob(jobs[0], 1)).toEqual([]);
    const second = fs.readFileSync(path.join(dir, "results", "wiretest", "deepsvdd", "scores", "run-0.csv"));
    expect(second.equals(first)).toBe(true);
  }, 120_000);

  test("every zoo model emits files the engine accepts", () => {
    const dir = tmpDir("zoo-integration-");
    setupEngineExports(dir, 1);
    const quick: Record<string, string> = {
      ocsvm: "nu = 0.1\n",
      dae: "epoch = 10\n",
      deepsvdd: "epoch = 10\n",
      memae: "epoch = 10\n",
      dagmm: "epoch = 10\ncomponents = 2\n",
      "som-dagmm": "epoch = 10\ncomponents = 2\nsom_side = 4\nsom_epochs = 2\n",
      "dsebm-e": "epoch = 10\nhidden_dim = 8\n",
      "dsebm-r": "epoch = 10\nhidden_dim = 8\n",
      drocc: "epoch = 6\nonly_ce_epochs = 4\ngradient_ascent_steps = 3\nradius = 0.3\n",
      alad: "epoch = 10\nhidden_dim = 8\n",
      neutralad: "epoch = 10\nnum_transforms = 3\n",
      duad: "epoch = 10\nclusters = 3\n",
    };
    const patterns: string[] = [];
    for (const [model, extra] of Object.entries(quick)) {
      const jobs = parseZooConfig(writeZooConfig(dir, model, extra));
      expect(executeJob(jobs[0], 1), model).toEqual([]);
      patterns.push(path.join(dir, "results", "wiretest", model, "scores", "run-0.csv"));
    }
    const verdict = python(
      `
import json
from anobench.metrics import read_score_file
results = {}
for p in ${JSON.stringify(patterns)}:
    indices, scoreset = read_score_file(p)
    results[scoreset.detector_name] = len(scoreset)
print(json.dumps(results))
`
    );
    const sizes = JSON.parse(verdict);
    expect(Object.keys(sizes).length).toBe(Object.keys(quick).length);
    for (const size of Object.values(sizes)) expect(size).toBe(140); // 110 normals + 30 anomalies
  }, 240_000);
});
