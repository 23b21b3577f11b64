/**
 * Structured energy-based detector with two scoring variants: the sample
 * energy itself (-e) and the reconstruction error (-r), where the
 * reconstruction is the input minus the input-gradient of the energy.
 *
 * Energy: E(x) = 1/2 ||x - b||^2 - sum(softplus(h2)) with a two-layer
 * softplus network; the input gradient is written out analytically so the
 * denoising training objective stays first-order for the autograd engine:
 *   dE/dx = (x - b) - sigmoid(h1) .* (sigmoid(h2) W2^T) W1^T
 */

import * as tf from "@tensorflow/tfjs";

import type { Hyper } from "../config";
import { Rand } from "../rng";
import { adamLoop, toTensor, TrainingError } from "../tensors";
import { num, ZooModel } from "./base";

export class Dsebm implements ZooModel {
  readonly name: string;
  private readonly hyper: Hyper;
  private readonly variant: "energy" | "reconstruction";
  private W1: tf.Variable | null = null;
  private b1: tf.Variable | null = null;
  private W2: tf.Variable | null = null;
  private b2: tf.Variable | null = null;
  private bias: tf.Variable | null = null;
  private dim = 0;

  constructor(hyper: Hyper, variant: "energy" | "reconstruction") {
    this.hyper = hyper;
    this.variant = variant;
    this.name = variant === "energy" ? "dsebm-e" : "dsebm-r";
  }

  private energyPieces(x: tf.Tensor2D) {
    const h1 = tf.add(tf.matMul(x, this.W1!), this.b1!);
    const a1 = tf.softplus(h1);
    const h2 = tf.add(tf.matMul(a1 as tf.Tensor2D, this.W2!), this.b2!);
    return { h1, h2 };
  }

  private energy(x: tf.Tensor2D): tf.Tensor1D {
    const { h2 } = this.energyPieces(x);
    const quad = tf.mul(0.5, tf.sum(tf.square(tf.sub(x, this.bias!)), 1));
    return tf.sub(quad, tf.sum(tf.softplus(h2), 1)) as tf.Tensor1D;
  }

  /** Analytic dE/dx, differentiable wrt the network parameters. */
  private energyInputGrad(x: tf.Tensor2D): tf.Tensor2D {
    const { h1, h2 } = this.energyPieces(x);
    const back = tf.matMul(
      tf.mul(tf.sigmoid(h1), tf.matMul(tf.sigmoid(h2) as tf.Tensor2D, this.W2!, false, true)),
      this.W1!,
      false,
      true
    );
    return tf.sub(tf.sub(x, this.bias!), back) as tf.Tensor2D;
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    const hidden = num(this.hyper, "hidden_dim", num(this.hyper, "lat_dim"));
    const noiseStd = num(this.hyper, "noise_std", 0.5);
    const bound1 = Math.sqrt(6 / (d + hidden));
    const bound2 = Math.sqrt(6 / (hidden + hidden));
    this.W1 = tf.variable(tf.randomUniform([d, hidden], -bound1, bound1, "float32", seed));
    this.b1 = tf.variable(tf.zeros([hidden]));
    this.W2 = tf.variable(
      tf.randomUniform([hidden, hidden], -bound2, bound2, "float32", seed + 1)
    );
    this.b2 = tf.variable(tf.zeros([hidden]));
    this.bias = tf.variable(tf.zeros([d]));
    const variables = [this.W1, this.b1, this.W2, this.b2, this.bias];

    const X = toTensor(train, n, d);
    const noiseRand = new Rand(BigInt(seed) ^ 0xd5ebn);
    try {
      adamLoop(
        X,
        variables,
        (batch) =>
          tf.tidy(() => {
            // denoising objective: reconstruct the clean batch from a
            // corrupted copy via one energy-gradient step
            const noise = new Float32Array(batch.shape[0] * batch.shape[1]);
            for (let i = 0; i < noise.length; i++) {
              noise[i] = noiseRand.normal() * noiseStd;
            }
            const noisy = tf.add(
              batch,
              tf.tensor2d(noise, [batch.shape[0], batch.shape[1]])
            ) as tf.Tensor2D;
            const recon = tf.sub(noisy, this.energyInputGrad(noisy));
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
    if (!this.W1) throw new Error("fit before score");
    const values = tf.tidy(() => {
      const X = toTensor(test, n, d);
      if (this.variant === "energy") {
        return this.energy(X).dataSync();
      }
      return tf.sum(tf.square(this.energyInputGrad(X)), 1).dataSync();
    });
    const out = Float64Array.from(values);
    if (out.some((v) => !Number.isFinite(v))) {
      throw new TrainingError("non-finite scores from the energy network");
    }
    return out;
  }

  dispose(): void {
    [this.W1, this.b1, this.W2, this.b2, this.bias].forEach((v) => v?.dispose());
  }
}
