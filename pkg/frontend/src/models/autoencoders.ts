/**
 * Reconstruction-based detectors: the plain autoencoder baseline and the
 * memory-augmented variant (encoder, sparse attention over a learned
 * memory, decoder).  Both score by squared reconstruction error.
 */

import * as tf from "@tensorflow/tfjs";

import type { Hyper } from "../config";
import { adamLoop, DenseSpec, DenseStack, safeNorm, toTensor } from "../tensors";
import { num, str, ZooModel } from "./base";

export function encoderSpecs(d: number, latent: number): DenseSpec[] {
  return [
    { units: Math.ceil(d / 2), activation: "relu" },
    { units: Math.ceil(d / 4), activation: "relu" },
    { units: latent, activation: "relu" },
  ];
}

export function decoderSpecs(d: number): DenseSpec[] {
  return [
    { units: Math.ceil(d / 4), activation: "relu" },
    { units: Math.ceil(d / 2), activation: "relu" },
    { units: d, activation: "linear" },
  ];
}

export class ZooDae implements ZooModel {
  readonly name = "dae";
  protected readonly hyper: Hyper;
  protected encoder: DenseStack | null = null;
  protected decoder: DenseStack | null = null;
  protected dim = 0;

  constructor(hyper: Hyper) {
    this.hyper = hyper;
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    const latent = num(this.hyper, "lat_dim");
    this.encoder = new DenseStack(d, encoderSpecs(d, latent), seed);
    this.decoder = new DenseStack(latent, decoderSpecs(d), seed + 7919);
    const X = toTensor(train, n, d);
    try {
      adamLoop(
        X,
        [...this.encoder.variables, ...this.decoder.variables],
        (batch) =>
          tf.tidy(() => {
            const recon = this.decoder!.apply(this.encoder!.apply(batch));
            return tf.mean(tf.square(tf.sub(recon, batch))) as tf.Scalar;
          }),
        {
          epochs: num(this.hyper, "epoch"),
          batchSize: num(this.hyper, "batch"),
          learningRate: num(this.hyper, "learning_rate"),
          weightDecay: num(this.hyper, "weight_decay", 0),
          seed,
        }
      );
    } finally {
      X.dispose();
    }
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

export class MemAe implements ZooModel {
  readonly name = "memae";
  private readonly hyper: Hyper;
  private encoder: DenseStack | null = null;
  private decoder: DenseStack | null = null;
  private memory: tf.Variable | null = null;
  private shrink = 0;
  private dim = 0;

  constructor(hyper: Hyper) {
    this.hyper = hyper;
  }

  /** Cosine attention over memory items, hard-shrunk and renormalized. */
  private addressMemory(z: tf.Tensor2D): tf.Tensor2D {
    const M = this.memory!;
    const zNorm = tf.div(z, safeNorm(z));
    const mNorm = tf.div(M, safeNorm(M as tf.Tensor2D));
    const att = tf.softmax(tf.matMul(zNorm, mNorm, false, true)) as tf.Tensor2D;
    // step() has zero gradient, so shrinkage keeps attention gradients
    // flowing only through surviving entries; the abs-based rescaling form
    // differentiates to NaN when a weight sits exactly on the threshold.
    const mask = tf.step(tf.sub(att, this.shrink));
    const shrunk = tf.mul(att, mask);
    const renorm = tf.div(shrunk, tf.add(tf.sum(shrunk, 1, true), 1e-12)) as tf.Tensor2D;
    return tf.matMul(renorm, M) as tf.Tensor2D;
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    const latent = num(this.hyper, "lat_dim");
    const memDim = num(this.hyper, "mem_dim");
    this.shrink = num(this.hyper, "shrink_threshold", 1 / memDim);
    const entropyWeight = num(this.hyper, "entropy_weight", 2e-4);
    this.encoder = new DenseStack(d, encoderSpecs(d, latent), seed);
    this.decoder = new DenseStack(latent, decoderSpecs(d), seed + 7919);
    this.memory = tf.variable(
      tf.randomUniform([memDim, latent], -0.1, 0.1, "float32", seed + 104729)
    );
    const X = toTensor(train, n, d);
    try {
      adamLoop(
        X,
        [...this.encoder.variables, ...this.decoder.variables, this.memory],
        (batch) =>
          tf.tidy(() => {
            const z = this.encoder!.apply(batch);
            const retrieved = this.addressMemory(z);
            const recon = this.decoder!.apply(retrieved);
            const mse = tf.mean(tf.square(tf.sub(recon, batch)));
            // entropy of the addressing weights promotes sparsity
            const zn = tf.div(z, safeNorm(z));
            const mn = tf.div(this.memory!, safeNorm(this.memory! as tf.Tensor2D));
            const att = tf.softmax(tf.matMul(zn, mn, false, true));
            const entropy = tf.neg(
              tf.mean(tf.sum(tf.mul(att, tf.log(tf.add(att, 1e-12))), 1))
            );
            return tf.add(mse, tf.mul(entropyWeight, entropy)) as tf.Scalar;
          }),
        {
          epochs: num(this.hyper, "epoch"),
          batchSize: num(this.hyper, "batch"),
          learningRate: num(this.hyper, "learning_rate"),
          weightDecay: num(this.hyper, "weight_decay", 0),
          seed,
        }
      );
    } finally {
      X.dispose();
    }
  }

  score(test: Float64Array, n: number, d: number): Float64Array {
    if (!this.encoder || !this.decoder || !this.memory) throw new Error("fit before score");
    const values = tf.tidy(() => {
      const X = toTensor(test, n, d);
      const recon = this.decoder!.apply(this.addressMemory(this.encoder!.apply(X)));
      return tf.sum(tf.square(tf.sub(X, recon)), 1).dataSync();
    });
    return Float64Array.from(values);
  }

  dispose(): void {
    this.encoder?.dispose();
    this.decoder?.dispose();
    this.memory?.dispose();
  }
}

export class DeepSvdd implements ZooModel {
  readonly name = "deepsvdd";
  private readonly hyper: Hyper;
  private net: DenseStack | null = null;
  private center: tf.Tensor1D | null = null;
  private dim = 0;

  constructor(hyper: Hyper) {
    this.hyper = hyper;
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    const outDim = num(this.hyper, "n_output_features");
    // Bias-free layers with unbounded activations guard against the
    // trivial collapse of the hypersphere.
    this.net = new DenseStack(
      d,
      [
        { units: Math.max(Math.ceil(d / 2), outDim), activation: "leakyRelu", useBias: false },
        { units: outDim, activation: "linear", useBias: false },
      ],
      seed
    );
    const X = toTensor(train, n, d);
    try {
      const initial = tf.tidy(() => tf.mean(this.net!.apply(X), 0) as tf.Tensor1D);
      // keep the center away from the origin
      const centerVals = Float32Array.from(initial.dataSync());
      initial.dispose();
      for (let i = 0; i < centerVals.length; i++) {
        if (Math.abs(centerVals[i]) < 0.1) centerVals[i] = centerVals[i] >= 0 ? 0.1 : -0.1;
      }
      this.center = tf.tensor1d(centerVals);
      adamLoop(
        X,
        this.net.variables,
        (batch) =>
          tf.tidy(() => {
            const phi = this.net!.apply(batch);
            return tf.mean(tf.sum(tf.square(tf.sub(phi, this.center!)), 1)) as tf.Scalar;
          }),
        {
          epochs: num(this.hyper, "epoch"),
          batchSize: num(this.hyper, "batch"),
          learningRate: num(this.hyper, "learning_rate"),
          weightDecay: num(this.hyper, "weight_decay", 1e-6),
          seed,
        }
      );
    } finally {
      X.dispose();
    }
  }

  score(test: Float64Array, n: number, d: number): Float64Array {
    if (!this.net || !this.center) throw new Error("fit before score");
    const values = tf.tidy(() => {
      const X = toTensor(test, n, d);
      const phi = this.net!.apply(X);
      return tf.sum(tf.square(tf.sub(phi, this.center!)), 1).dataSync();
    });
    return Float64Array.from(values);
  }

  dispose(): void {
    this.net?.dispose();
    this.center?.dispose();
  }
}
