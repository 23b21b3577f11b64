/**
 * Autoencoder with distribution-driven reselection: every few epochs the
 * latent codes are clustered and only samples from the low-variance
 * clusters stay in the training pool, so rare (likely contaminated or
 * atypical) regions stop influencing the reconstruction.  Scores are
 * reconstruction errors.
 */

import * as tf from "@tensorflow/tfjs";

import type { Hyper } from "../config";
import { Rand } from "../rng";
import { adamLoop, DenseStack, toTensor } from "../tensors";
import { decoderSpecs, encoderSpecs } from "./autoencoders";
import { num, ZooModel } from "./base";

export class Duad implements ZooModel {
  readonly name = "duad";
  private readonly hyper: Hyper;
  private encoder: DenseStack | null = null;
  private decoder: DenseStack | null = null;
  private dim = 0;

  constructor(hyper: Hyper) {
    this.hyper = hyper;
  }

  private reconstructionLoss(batch: tf.Tensor2D): tf.Scalar {
    const recon = this.decoder!.apply(this.encoder!.apply(batch));
    return tf.mean(tf.square(tf.sub(recon, batch))) as tf.Scalar;
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    const latent = num(this.hyper, "lat_dim");
    const epochs = num(this.hyper, "epoch");
    const period = Math.max(num(this.hyper, "r"), 1);
    const p0 = num(this.hyper, "p0");
    const ps = num(this.hyper, "ps");
    const clusters = num(this.hyper, "clusters");
    this.encoder = new DenseStack(d, encoderSpecs(d, latent), seed);
    this.decoder = new DenseStack(latent, decoderSpecs(d), seed + 7919);
    const X = toTensor(train, n, d);
    const rand = new Rand(BigInt(seed) ^ 0xd0adn);

    let selected: Int32Array = new Int32Array(n);
    for (let i = 0; i < n; i++) selected[i] = i;
    try {
      let done = 0;
      let phase = 0;
      while (done < epochs) {
        const span = Math.min(period, epochs - done);
        const subset = tf.gather(X, tf.tensor1d(selected, "int32")) as tf.Tensor2D;
        adamLoop(subset, [...this.encoder.variables, ...this.decoder.variables],
          (batch) => tf.tidy(() => this.reconstructionLoss(batch)),
          {
            epochs: span,
            batchSize: num(this.hyper, "batch"),
            learningRate: num(this.hyper, "learning_rate"),
            seed: seed + done,
          });
        subset.dispose();
        done += span;
        if (done >= epochs) break;
        // reselect: drop samples in the highest-variance latent clusters
        const percentile = phase === 0 ? p0 : ps;
        phase += 1;
        selected = this.reselect(X, n, clusters, percentile, rand);
      }
    } finally {
      X.dispose();
    }
  }

  /** K-means over latents; keep samples outside the top-variance clusters. */
  private reselect(
    X: tf.Tensor2D,
    n: number,
    clusters: number,
    dropPercent: number,
    rand: Rand
  ): Int32Array {
    const latents = tf.tidy(() => this.encoder!.apply(X).dataSync());
    const latDim = latents.length / n;
    const assignment = kmeans(latents, n, latDim, clusters, rand);
    const variance = new Float64Array(clusters);
    const counts = new Float64Array(clusters);
    const centroids = new Float64Array(clusters * latDim);
    for (let i = 0; i < n; i++) {
      const c = assignment[i];
      counts[c] += 1;
      for (let k = 0; k < latDim; k++) centroids[c * latDim + k] += latents[i * latDim + k];
    }
    for (let c = 0; c < clusters; c++) {
      if (counts[c] > 0) {
        for (let k = 0; k < latDim; k++) centroids[c * latDim + k] /= counts[c];
      }
    }
    for (let i = 0; i < n; i++) {
      const c = assignment[i];
      let dist = 0;
      for (let k = 0; k < latDim; k++) {
        const diff = latents[i * latDim + k] - centroids[c * latDim + k];
        dist += diff * diff;
      }
      variance[c] += dist;
    }
    for (let c = 0; c < clusters; c++) if (counts[c] > 0) variance[c] /= counts[c];

    const populated = [];
    for (let c = 0; c < clusters; c++) if (counts[c] > 0) populated.push(c);
    const ranked = populated.slice().sort((a, b) => variance[a] - variance[b]);
    const keepCount = Math.max(1, Math.ceil(ranked.length * (1 - dropPercent / 100)));
    const kept = new Set(ranked.slice(0, keepCount));
    const indices: number[] = [];
    for (let i = 0; i < n; i++) if (kept.has(assignment[i])) indices.push(i);
    // never let the pool collapse below a trainable size
    if (indices.length < Math.max(8, clusters)) {
      const all = new Int32Array(n);
      for (let i = 0; i < n; i++) all[i] = i;
      return all;
    }
    return Int32Array.from(indices);
  }

  score(test: Float64Array, n: number, d: number): Float64Array {
    if (!this.encoder || !this.decoder) throw new Error("fit before score");
    const values = tf.tidy(() => {
      const X = toTensor(test, n, d);
      const recon = this.decoder!.apply(this.encoder!.apply(X));
      return tf.sum(tf.square(tf.sub(X, recon)), 1).dataSync();
    });
    return Float64Array.from(values);
  }

  dispose(): void {
    this.encoder?.dispose();
    this.decoder?.dispose();
  }
}

function kmeans(
  data: ArrayLike<number>,
  n: number,
  d: number,
  k: number,
  rand: Rand,
  iters = 50
): Int32Array {
  const centroids = new Float64Array(k * d);
  for (let c = 0; c < k; c++) {
    const row = rand.int(n);
    for (let j = 0; j < d; j++) centroids[c * d + j] = data[row * d + j];
  }
  const assignment = new Int32Array(n);
  for (let iter = 0; iter < iters; iter++) {
    let changed = false;
    for (let i = 0; i < n; i++) {
      let best = Infinity;
      let bestC = 0;
      for (let c = 0; c < k; c++) {
        let dist = 0;
        for (let j = 0; j < d; j++) {
          const diff = data[i * d + j] - centroids[c * d + j];
          dist += diff * diff;
        }
        if (dist < best) {
          best = dist;
          bestC = c;
        }
      }
      if (assignment[i] !== bestC) changed = true;
      assignment[i] = bestC;
    }
    if (!changed && iter > 0) break;
    centroids.fill(0);
    const counts = new Float64Array(k);
    for (let i = 0; i < n; i++) {
      counts[assignment[i]] += 1;
      for (let j = 0; j < d; j++) centroids[assignment[i] * d + j] += data[i * d + j];
    }
    for (let c = 0; c < k; c++) {
      if (counts[c] > 0) {
        for (let j = 0; j < d; j++) centroids[c * d + j] /= counts[c];
      } else {
        const row = rand.int(n);
        for (let j = 0; j < d; j++) centroids[c * d + j] = data[row * d + j];
      }
    }
  }
  return assignment;
}
