/**
 * Kernel one-class SVM with an SMO solver (RBF kernel).
 *
 * Solves min 1/2 a'Qa subject to 0 <= a_i <= 1 and sum a = nu * n, by
 * maximal-violating-pair working-set selection; the decision function is
 * f(x) = sum_i a_i k(x_i, x) - rho and the anomaly score is -f(x).
 * gamma defaults to 1 / (d * var(X)) ("scale").
 */

import type { Hyper } from "../config";
import { num } from "./base";
import type { ZooModel } from "./base";

export class OcSvm implements ZooModel {
  readonly name = "ocsvm";
  private readonly nu: number;
  private readonly gammaSpec: string | number;
  private readonly tol: number;
  private readonly maxIter: number;

  private gamma = 1;
  private support: Float64Array | null = null; // rows with alpha > 0
  private supportAlpha: Float64Array | null = null;
  private nSupport = 0;
  private dim = 0;
  private rho = 0;

  constructor(hyper: Hyper) {
    this.nu = num(hyper, "nu");
    if (!(this.nu > 0 && this.nu <= 1)) throw new Error(`nu must be in (0, 1], got ${this.nu}`);
    this.gammaSpec = hyper["gamma"] ?? "scale";
    this.tol = num(hyper, "tol", 1e-3);
    this.maxIter = num(hyper, "max_iter", 10_000_000);
  }

  fit(train: Float64Array, n: number, d: number): void {
    this.dim = d;
    this.gamma =
      this.gammaSpec === "scale"
        ? 1 / (d * Math.max(variance(train), 1e-12))
        : Number(this.gammaSpec);

    const Q = kernelMatrix(train, n, d, this.gamma);
    const alpha = new Float64Array(n);
    // Standard warm start: the first floor(nu*n) points saturated, the next
    // one fractional so the equality constraint holds exactly.
    const total = this.nu * n;
    const whole = Math.floor(total);
    for (let i = 0; i < whole && i < n; i++) alpha[i] = 1;
    if (whole < n) alpha[whole] = total - whole;

    const G = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      let acc = 0;
      for (let j = 0; j < n; j++) acc += alpha[j] * Q[i * n + j];
      G[i] = acc;
    }

    for (let iter = 0; iter < this.maxIter; iter++) {
      // i: steepest ascent among upward-movable, j: among downward-movable.
      let i = -1;
      let j = -1;
      let minG = Infinity;
      let maxG = -Infinity;
      for (let t = 0; t < n; t++) {
        if (alpha[t] < 1 && G[t] < minG) {
          minG = G[t];
          i = t;
        }
        if (alpha[t] > 0 && G[t] > maxG) {
          maxG = G[t];
          j = t;
        }
      }
      if (i < 0 || j < 0 || maxG - minG < this.tol) break;
      const quad = Math.max(Q[i * n + i] + Q[j * n + j] - 2 * Q[i * n + j], 1e-12);
      let step = (G[j] - G[i]) / quad;
      step = Math.min(step, 1 - alpha[i], alpha[j]);
      if (step <= 0) break;
      alpha[i] += step;
      alpha[j] -= step;
      for (let t = 0; t < n; t++) {
        G[t] += step * (Q[t * n + i] - Q[t * n + j]);
      }
    }

    // rho: mean gradient over free vectors, else the midpoint of the bounds.
    let freeSum = 0;
    let freeCount = 0;
    let upper = Infinity; // min G over alpha == 0
    let lower = -Infinity; // max G over alpha == 1
    for (let t = 0; t < n; t++) {
      if (alpha[t] > 1e-12 && alpha[t] < 1 - 1e-12) {
        freeSum += G[t];
        freeCount++;
      } else if (alpha[t] <= 1e-12) {
        upper = Math.min(upper, G[t]);
      } else {
        lower = Math.max(lower, G[t]);
      }
    }
    this.rho = freeCount > 0 ? freeSum / freeCount : (upper + lower) / 2;

    this.nSupport = 0;
    for (let t = 0; t < n; t++) if (alpha[t] > 1e-12) this.nSupport++;
    this.support = new Float64Array(this.nSupport * d);
    this.supportAlpha = new Float64Array(this.nSupport);
    let s = 0;
    for (let t = 0; t < n; t++) {
      if (alpha[t] > 1e-12) {
        this.support.set(train.subarray(t * d, (t + 1) * d), s * d);
        this.supportAlpha[s] = alpha[t];
        s++;
      }
    }
  }

  score(test: Float64Array, n: number, d: number): Float64Array {
    if (!this.support || !this.supportAlpha) throw new Error("fit before score");
    if (d !== this.dim) throw new Error(`expected ${this.dim} features, got ${d}`);
    const out = new Float64Array(n);
    for (let r = 0; r < n; r++) {
      let f = 0;
      for (let s = 0; s < this.nSupport; s++) {
        let dist = 0;
        for (let k = 0; k < d; k++) {
          const diff = test[r * d + k] - this.support[s * d + k];
          dist += diff * diff;
        }
        f += this.supportAlpha[s] * Math.exp(-this.gamma * dist);
      }
      out[r] = this.rho - f; // higher = more anomalous
    }
    return out;
  }

  dispose(): void {}
}

function variance(values: Float64Array): number {
  let mean = 0;
  for (let i = 0; i < values.length; i++) mean += values[i];
  mean /= values.length;
  let acc = 0;
  for (let i = 0; i < values.length; i++) {
    const diff = values[i] - mean;
    acc += diff * diff;
  }
  return acc / values.length;
}

function kernelMatrix(X: Float64Array, n: number, d: number, gamma: number): Float64Array {
  const Q = new Float64Array(n * n);
  for (let i = 0; i < n; i++) {
    Q[i * n + i] = 1;
    for (let j = i + 1; j < n; j++) {
      let dist = 0;
      for (let k = 0; k < d; k++) {
        const diff = X[i * d + k] - X[j * d + k];
        dist += diff * diff;
      }
      const value = Math.exp(-gamma * dist);
      Q[i * n + j] = value;
      Q[j * n + i] = value;
    }
  }
  return Q;
}
