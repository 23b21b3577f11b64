#!/usr/bin/env node
/**
 * Train configured detectors against engine-exported splits and emit one
 * score file per run in the engine's wire format.
 *
 * Usage: node dist/run.js --config zoo.cfg [--only SECTION] [--runs N]
 *
 * Exit codes: 0 success, 2 configuration error, 3 wire/data error,
 * 4 at least one run failed (recorded in failures.json, never silent).
 */

import * as fs from "fs";
import * as path from "path";

import { ConfigError, parseZooConfig, ZooJob } from "./config";
import { buildModel } from "./models/registry";
import { deriveSeed } from "./rng";
import { TrainingError } from "./tensors";
import { gatherRows, readCache, readIndices, WireError, writeScoreFile } from "./wire";

interface RunFailure {
  run: number;
  error: string;
}

export function executeJob(job: ZooJob, runsOverride?: number): RunFailure[] {
  const cache = readCache(job.cacheDir, job.dataset);
  const failures: RunFailure[] = [];
  const runs = runsOverride ?? job.runs;
  for (const warning of job.warnings) {
    console.warn(`[${job.section}] warning: ${warning}`);
  }
  for (let run = 0; run < runs; run++) {
    const trainIdx = readIndices(path.join(job.splitsDir, `run-${run}.train.csv`));
    const testIdx = readIndices(path.join(job.splitsDir, `run-${run}.test.csv`));
    const seed = deriveSeed(job.seed, 3, run); // engine's detector lane
    const model = buildModel(job.model, job.hyper);
    try {
      const trainX = gatherRows(cache, trainIdx);
      const testX = gatherRows(cache, testIdx);
      console.log(
        `[${job.section}] run ${run}: seed=${seed} ` +
          `train=${trainIdx.length} test=${testIdx.length}`
      );
      model.fit(trainX, trainIdx.length, cache.nFeatures, seed);
      const scores = model.score(testX, testIdx.length, cache.nFeatures);
      const labels = new Uint8Array(testIdx.length);
      for (let i = 0; i < testIdx.length; i++) labels[i] = cache.labels[testIdx[i]];
      const outFile = path.join(job.outDir, `run-${run}.csv`);
      writeScoreFile(outFile, testIdx, scores, labels, job.model);
      console.log(`[${job.section}] run ${run}: wrote ${outFile}`);
    } catch (err) {
      // divergence or scoring failure: record it, keep the other runs going
      const message = err instanceof Error ? err.message : String(err);
      console.error(`[${job.section}] run ${run} FAILED: ${message}`);
      failures.push({ run, error: message });
      if (!(err instanceof TrainingError || err instanceof WireError)) throw err;
    } finally {
      model.dispose();
    }
  }
  if (failures.length) {
    fs.mkdirSync(job.outDir, { recursive: true });
    fs.writeFileSync(
      path.join(job.outDir, "failures.json"),
      JSON.stringify({ section: job.section, failures }, null, 2) + "\n"
    );
  }
  return failures;
}

function parseArgs(argv: string[]): { config: string; only?: string; runs?: number } {
  const args: { config?: string; only?: string; runs?: number } = {};
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--config") args.config = argv[++i];
    else if (argv[i] === "--only") args.only = argv[++i];
    else if (argv[i] === "--runs") args.runs = Number(argv[++i]);
    else throw new ConfigError(`unknown argument ${argv[i]}`);
  }
  if (!args.config) throw new ConfigError("--config is required");
  return { config: args.config, only: args.only, runs: args.runs };
}

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  try {
    let jobs = parseZooConfig(args.config);
    if (args.only) {
      jobs = jobs.filter((j) => j.section === args.only);
      if (!jobs.length) throw new ConfigError(`no section named '${args.only}'`);
    }
    let failed = 0;
    for (const job of jobs) {
      failed += executeJob(job, args.runs).length;
    }
    return failed ? 4 : 0;
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    console.error(message);
    if (err instanceof ConfigError) return 2;
    if (err instanceof WireError) return 3;
    return 4;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
