import type { Hyper } from "../config";

/** The whole surface a zoo detector exposes: fit on features, score features. */
export interface ZooModel {
  readonly name: string;
  fit(train: Float64Array, n: number, d: number, seed: number): void;
  /** Anomaly scores in the canonical orientation (higher = more anomalous). */
  score(test: Float64Array, n: number, d: number): Float64Array;
  dispose(): void;
}

export type ModelFactory = (hyper: Hyper) => ZooModel;

export function num(hyper: Hyper, key: string, fallback?: number): number {
  const value = hyper[key];
  if (value === undefined) {
    if (fallback === undefined) throw new Error(`missing hyperparameter '${key}'`);
    return fallback;
  }
  return Number(value);
}

export function str(hyper: Hyper, key: string, fallback: string): string {
  const value = hyper[key];
  return value === undefined ? fallback : String(value);
}
