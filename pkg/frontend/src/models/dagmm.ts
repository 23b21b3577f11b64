/**
 * Gaussian-mixture energy detectors: an autoencoder compresses each sample,
 * an estimation network soft-assigns the compressed representation (latent
 * code + reconstruction features) to mixture components, and the sample
 * energy under the fitted mixture is the anomaly score.  The SOM variant
 * additionally feeds normalized best-matching-unit coordinates from a
 * self-organizing map into the estimation network.
 */

import * as tf from "@tensorflow/tfjs";

import type { Hyper } from "../config";
import { Rand } from "../rng";
import { adamLoop, DenseStack, gaussianLogDensity, safeNorm, toTensor } from "../tensors";
import { decoderSpecs, encoderSpecs } from "./autoencoders";
import { num, ZooModel } from "./base";

interface MixtureParams {
  logPhi: tf.Tensor1D[];
  mu: tf.Tensor1D[];
  sigma: tf.Tensor2D[];
}

export class Dagmm implements ZooModel {
  readonly name: string = "dagmm";
  protected readonly hyper: Hyper;
  protected encoder: DenseStack | null = null;
  protected decoder: DenseStack | null = null;
  protected estimation: DenseStack | null = null;
  protected mixture: MixtureParams | null = null;
  protected dim = 0;
  protected zDim = 0;

  constructor(hyper: Hyper) {
    this.hyper = hyper;
  }

  /** Extra coordinates appended to the estimation input (SOM hook). */
  protected extraFeatures(batch: tf.Tensor2D): tf.Tensor2D | null {
    return null;
  }

  protected extraDim(): number {
    return 0;
  }

  protected prepare(train: Float64Array, n: number, d: number, seed: number): void {}

  private estimationInput(batch: tf.Tensor2D): { z: tf.Tensor2D; recon: tf.Tensor2D } {
    const code = this.encoder!.apply(batch);
    const recon = this.decoder!.apply(code);
    const diff = tf.sub(batch, recon) as tf.Tensor2D;
    const euclid = tf.div(safeNorm(diff), safeNorm(batch));
    const cosine = tf.div(
      tf.sum(tf.mul(batch, recon), 1, true),
      tf.mul(safeNorm(batch), safeNorm(recon as tf.Tensor2D))
    );
    const parts: tf.Tensor2D[] = [code, euclid as tf.Tensor2D, cosine as tf.Tensor2D];
    const extra = this.extraFeatures(batch);
    if (extra) parts.unshift(extra);
    return { z: tf.concat(parts, 1) as tf.Tensor2D, recon };
  }

  /** Soft-assignment-weighted mixture statistics of the batch. */
  private mixtureFrom(z: tf.Tensor2D, gamma: tf.Tensor2D, k: number): MixtureParams {
    const n = z.shape[0];
    const logPhi: tf.Tensor1D[] = [];
    const mu: tf.Tensor1D[] = [];
    const sigma: tf.Tensor2D[] = [];
    const cols = tf.unstack(gamma, 1);
    for (let c = 0; c < k; c++) {
      const g = tf.reshape(cols[c], [n, 1]);
      const weight = tf.add(tf.sum(g), 1e-12);
      logPhi.push(tf.log(tf.div(weight, n)) as tf.Tensor1D);
      const mean = tf.div(tf.sum(tf.mul(g, z), 0), weight) as tf.Tensor1D;
      mu.push(mean);
      const centered = tf.sub(z, mean);
      const cov = tf.div(tf.matMul(tf.mul(g, centered), centered, true, false), weight);
      // single-precision autodiff through the factorization needs a solid
      // diagonal floor, or degenerate dimensions blow up the gradients
      sigma.push(
        tf.add(cov, tf.mul(tf.eye(this.zDim), 1e-3)) as tf.Tensor2D
      );
    }
    return { logPhi, mu, sigma };
  }

  private energy(z: tf.Tensor2D, params: MixtureParams, k: number): tf.Tensor1D {
    const terms: tf.Tensor1D[] = [];
    for (let c = 0; c < k; c++) {
      const logDensity = gaussianLogDensity(z, params.mu[c], params.sigma[c], this.zDim);
      terms.push(tf.add(logDensity, params.logPhi[c]) as tf.Tensor1D);
    }
    return tf.neg(tf.logSumExp(tf.stack(terms), 0)) as tf.Tensor1D;
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    this.prepare(train, n, d, seed);
    const latent = num(this.hyper, "lat_dim");
    const k = num(this.hyper, "components", 4);
    const energyWeight = num(this.hyper, "energy_weight", 0.1);
    const covWeight = num(this.hyper, "cov_diag_weight", 0.005);
    this.zDim = latent + 2 + this.extraDim();
    this.encoder = new DenseStack(d, encoderSpecs(d, latent), seed);
    this.decoder = new DenseStack(latent, decoderSpecs(d), seed + 7919);
    this.estimation = new DenseStack(
      this.zDim,
      [
        { units: 10, activation: "tanh" },
        { units: k, activation: "linear" },
      ],
      seed + 104729
    );
    const X = toTensor(train, n, d);
    const variables = [
      ...this.encoder.variables,
      ...this.decoder.variables,
      ...this.estimation.variables,
    ];
    try {
      adamLoop(
        X,
        variables,
        (batch) =>
          tf.tidy(() => {
            const { z, recon } = this.estimationInput(batch);
            const gamma = tf.softmax(this.estimation!.apply(z)) as tf.Tensor2D;
            const params = this.mixtureFrom(z, gamma, k);
            const sampleEnergy = tf.mean(this.energy(z, params, k));
            const reconLoss = tf.mean(tf.square(tf.sub(recon, batch)));
            let covPenalty: tf.Tensor = tf.scalar(0);
            for (const s of params.sigma) {
              covPenalty = tf.add(
                covPenalty,
                tf.sum(tf.div(1, tf.add(diagOf(s, this.zDim), 1e-12)))
              );
            }
            return tf.add(
              tf.add(reconLoss, tf.mul(energyWeight, sampleEnergy)),
              tf.mul(covWeight, covPenalty)
            ) as tf.Scalar;
          }),
        {
          epochs: num(this.hyper, "epoch"),
          batchSize: num(this.hyper, "batch"),
          learningRate: num(this.hyper, "learning_rate"),
          weightDecay: num(this.hyper, "weight_decay", 0),
          seed,
        }
      );
      // Freeze mixture parameters estimated over the full training set.
      const kept = tf.tidy(() => {
        const { z } = this.estimationInput(X);
        const gamma = tf.softmax(this.estimation!.apply(z)) as tf.Tensor2D;
        const params = this.mixtureFrom(z, gamma, k);
        return [...params.logPhi, ...params.mu, ...params.sigma];
      });
      this.mixture = {
        logPhi: kept.slice(0, k) as tf.Tensor1D[],
        mu: kept.slice(k, 2 * k) as tf.Tensor1D[],
        sigma: kept.slice(2 * k) as tf.Tensor2D[],
      };
    } finally {
      X.dispose();
    }
  }

  score(test: Float64Array, n: number, d: number): Float64Array {
    if (!this.mixture) throw new Error("fit before score");
    const k = num(this.hyper, "components", 4);
    const values = tf.tidy(() => {
      const X = toTensor(test, n, d);
      const { z } = this.estimationInput(X);
      return this.energy(z, this.mixture!, k).dataSync();
    });
    return Float64Array.from(values);
  }

  dispose(): void {
    this.encoder?.dispose();
    this.decoder?.dispose();
    this.estimation?.dispose();
    if (this.mixture) {
      this.mixture.logPhi.forEach((t) => t.dispose());
      this.mixture.mu.forEach((t) => t.dispose());
      this.mixture.sigma.forEach((t) => t.dispose());
    }
  }
}

function diagOf(matrix: tf.Tensor2D, dim: number): tf.Tensor1D {
  return tf.sum(tf.mul(matrix, tf.eye(dim)), 1) as tf.Tensor1D;
}

/**
 * Self-organizing map trained online with a shrinking neighborhood; exposes
 * normalized best-matching-unit coordinates per sample.
 */
export class Som {
  readonly side: number;
  private readonly weights: Float64Array;
  private readonly dim: number;

  constructor(train: Float64Array, n: number, d: number, side: number, epochs: number, seed: number) {
    this.side = side;
    this.dim = d;
    const rand = new Rand(seed);
    this.weights = new Float64Array(side * side * d);
    for (let i = 0; i < this.weights.length; i++) this.weights[i] = rand.uniform();
    const steps = epochs * n;
    let t = 0;
    for (let epoch = 0; epoch < epochs; epoch++) {
      for (let r = 0; r < n; r++, t++) {
        const row = rand.int(n);
        const lr = 0.5 * (1 - t / steps) + 0.01;
        const radius = Math.max((side / 2) * (1 - t / steps), 0.5);
        const [bx, by] = this.bmu(train, row * d);
        for (let ux = 0; ux < side; ux++) {
          for (let uy = 0; uy < side; uy++) {
            const gridDist = (ux - bx) ** 2 + (uy - by) ** 2;
            if (gridDist > radius * radius) continue;
            const influence = Math.exp(-gridDist / (2 * radius * radius));
            const base = (ux * side + uy) * d;
            for (let k = 0; k < d; k++) {
              this.weights[base + k] +=
                lr * influence * (train[row * d + k] - this.weights[base + k]);
            }
          }
        }
      }
    }
  }

  private bmu(data: Float64Array, offset: number): [number, number] {
    let best = Infinity;
    let bx = 0;
    let by = 0;
    for (let ux = 0; ux < this.side; ux++) {
      for (let uy = 0; uy < this.side; uy++) {
        const base = (ux * this.side + uy) * this.dim;
        let dist = 0;
        for (let k = 0; k < this.dim; k++) {
          const diff = data[offset + k] - this.weights[base + k];
          dist += diff * diff;
        }
        if (dist < best) {
          best = dist;
          bx = ux;
          by = uy;
        }
      }
    }
    return [bx, by];
  }

  /** Normalized BMU coordinates in [0, 1]^2 for every row. */
  coordinates(data: Float64Array, n: number): Float32Array {
    const out = new Float32Array(n * 2);
    for (let r = 0; r < n; r++) {
      const [bx, by] = this.bmu(data, r * this.dim);
      out[r * 2] = bx / Math.max(this.side - 1, 1);
      out[r * 2 + 1] = by / Math.max(this.side - 1, 1);
    }
    return out;
  }
}

export class SomDagmm extends Dagmm {
  readonly name = "som-dagmm";
  private som: Som | null = null;

  protected override extraDim(): number {
    return 2;
  }

  protected override prepare(train: Float64Array, n: number, d: number, seed: number): void {
    this.som = new Som(
      train,
      n,
      d,
      num(this.hyper, "som_side", 10),
      num(this.hyper, "som_epochs", 5),
      seed + 15485863
    );
  }

  protected override extraFeatures(batch: tf.Tensor2D): tf.Tensor2D | null {
    // BMU lookup is not differentiable; coordinates enter as constants.
    const data = batch.dataSync();
    const n = batch.shape[0];
    const d = batch.shape[1];
    const rows = new Float64Array(n * d);
    for (let i = 0; i < rows.length; i++) rows[i] = data[i];
    const coords = this.som!.coordinates(rows, n);
    return tf.tensor2d(coords, [n, 2]);
  }
}
