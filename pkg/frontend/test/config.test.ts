import * as fs from "fs";
import * as path from "path";
import { describe, expect, test } from "vitest";

import { ConfigError, defaultsFor, parseZooConfig } from "../src/config";
import { tmpDir } from "./fixtures";

function writeConfig(text: string): string {
  const file = path.join(tmpDir("zoo-cfg-"), "zoo.cfg");
  fs.writeFileSync(file, text);
  return file;
}

describe("hyperparameter tables", () => {
  test("per-dataset defaults are prefilled", () => {
    expect(defaultsFor("ocsvm", "thyroid")["nu"]).toBe(0.05);
    expect(defaultsFor("ocsvm", "arrhythmia")["nu"]).toBe(0.4);
    expect(defaultsFor("neutralad", "thyroid")).toMatchObject({
      batch: 128,
      epoch: 580,
      lat_dim: 24,
      transformation_type: "residual",
    });
    expect(defaultsFor("memae", "ids2018")["mem_dim"]).toBe(250);
    expect(defaultsFor("drocc", "thyroid")).toMatchObject({ radius: 0.5, nu: 0.01 });
    expect(defaultsFor("dagmm", "kddcup10")["lat_dim"]).toBe(1);
  });

  test("unknown dataset falls back to generic defaults", () => {
    expect(defaultsFor("dae", "whatever")["epoch"]).toBe(200);
  });
});

describe("config parsing", () => {
  test("job with overrides", () => {
    const file = writeConfig(
      "[thyroid-ocsvm]\n" +
        "model = ocsvm\n" +
        "dataset = thyroid\n" +
        "cache_dir = cache\n" +
        "splits_dir = splits\n" +
        "runs = 20\n" +
        "seed = 42\n" +
        "nu = 0.1\n"
    );
    const jobs = parseZooConfig(file);
    expect(jobs).toHaveLength(1);
    expect(jobs[0].model).toBe("ocsvm");
    expect(jobs[0].hyper["nu"]).toBe(0.1);
    expect(jobs[0].runs).toBe(20);
  });

  test("unknown hyperparameter rejected with the accepted list", () => {
    const file = writeConfig(
      "[x]\nmodel = ocsvm\ndataset = thyroid\nsplits_dir = s\nbogus = 1\n"
    );
    expect(() => parseZooConfig(file)).toThrow(/unknown hyperparameter 'bogus'/);
  });

  test("unknown model rejected", () => {
    const file = writeConfig("[x]\nmodel = resnet\ndataset = thyroid\nsplits_dir = s\n");
    expect(() => parseZooConfig(file)).toThrow(ConfigError);
  });

  test("published batch -1 is flagged, not normalized", () => {
    const file = writeConfig("[x]\nmodel = drocc\ndataset = nsl-kdd\nsplits_dir = s\n");
    const jobs = parseZooConfig(file);
    expect(jobs[0].hyper["batch"]).toBe(-1);
    expect(jobs[0].warnings.join(" ")).toMatch(/full-batch/);
  });

  test("missing splits_dir rejected", () => {
    const file = writeConfig("[x]\nmodel = ocsvm\ndataset = thyroid\n");
    expect(() => parseZooConfig(file)).toThrow(/splits_dir/);
  });
});
