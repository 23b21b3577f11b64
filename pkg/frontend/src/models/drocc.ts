/**
 * One-class classifier trained against self-generated adversarial
 * negatives: after a cross-entropy warm-up on normal data alone, each batch
 * is augmented with perturbations found by projected gradient ascent and
 * constrained to an annulus [radius, 2 * radius] around the clean points.
 * Anomaly score is the negated classifier logit.
 */

import * as tf from "@tensorflow/tfjs";

import type { Hyper } from "../config";
import { Rand } from "../rng";
import { adamLoop, DenseStack, safeNorm, toTensor } from "../tensors";
import { num, ZooModel } from "./base";

export class Drocc implements ZooModel {
  readonly name = "drocc";
  private readonly hyper: Hyper;
  private net: DenseStack | null = null;
  private dim = 0;

  constructor(hyper: Hyper) {
    this.hyper = hyper;
  }

  private logits(x: tf.Tensor2D): tf.Tensor1D {
    return tf.reshape(this.net!.apply(x), [-1]) as tf.Tensor1D;
  }

  private bceWithLogits(logits: tf.Tensor1D, target: number): tf.Scalar {
    const t = tf.fill(logits.shape, target);
    // numerically stable binary cross-entropy on logits
    const loss = tf.add(
      tf.sub(tf.relu(logits), tf.mul(logits, t)),
      tf.log1p(tf.exp(tf.neg(tf.abs(logits))))
    );
    return tf.mean(loss) as tf.Scalar;
  }

  /** Projected gradient ascent for adversarial points in the annulus. */
  private adversarial(batch: tf.Tensor2D, rand: Rand): tf.Tensor2D {
    const radius = num(this.hyper, "radius");
    const gammaAnnulus = num(this.hyper, "gamma_annulus", 2);
    const steps = num(this.hyper, "gradient_ascent_steps");
    const ascentRate = num(this.hyper, "nu");
    const [n, d] = batch.shape;
    const init = new Float32Array(n * d);
    for (let i = 0; i < init.length; i++) init[i] = rand.normal() * 0.001;
    let delta = tf.tensor2d(init, [n, d]);
    for (let s = 0; s < steps; s++) {
      const gradFn = tf.grad((dl: tf.Tensor) => {
        const adv = tf.add(batch, dl) as tf.Tensor2D;
        return this.bceWithLogits(this.logits(adv), 0);
      });
      const g = gradFn(delta);
      const normalized = tf.div(g, safeNorm(g as tf.Tensor2D));
      const updated = tf.add(delta, tf.mul(normalized, ascentRate * radius)) as tf.Tensor2D;
      g.dispose();
      delta.dispose();
      // project onto the annulus: radius <= ||delta|| <= gamma * radius
      const norms = safeNorm(updated);
      const clipped = tf.clipByValue(norms, radius, gammaAnnulus * radius);
      delta = tf.mul(tf.div(updated, norms), clipped) as tf.Tensor2D;
      updated.dispose();
    }
    const adv = tf.add(batch, delta) as tf.Tensor2D;
    delta.dispose();
    return adv;
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    this.net = new DenseStack(
      d,
      [
        { units: Math.max(Math.ceil(d / 2), 4), activation: "relu" },
        { units: 1, activation: "linear" },
      ],
      seed
    );
    const X = toTensor(train, n, d);
    const warmup = num(this.hyper, "only_ce_epochs");
    const total = warmup + num(this.hyper, "epoch", 100);
    const mu = num(this.hyper, "mu");
    const rand = new Rand(BigInt(seed) ^ 0xd20ccn);
    try {
      adamLoop(
        X,
        this.net.variables,
        (batch, epoch, adversarial) =>
          tf.tidy(() => {
            const cleanLoss = this.bceWithLogits(this.logits(batch), 1);
            if (epoch < warmup || adversarial === null) return cleanLoss;
            const advLoss = this.bceWithLogits(this.logits(adversarial), 0);
            return tf.add(cleanLoss, tf.mul(mu, advLoss)) as tf.Scalar;
          }),
        {
          epochs: total,
          batchSize: num(this.hyper, "batch"),
          learningRate: num(this.hyper, "learning_rate"),
          seed,
          // the ascent needs input gradients of its own, so it runs outside
          // the optimizer tape and its result enters the loss as a constant
          prepareBatch: (batch, epoch) =>
            epoch < warmup ? null : this.adversarial(batch, rand),
        }
      );
    } finally {
      X.dispose();
    }
  }

  score(test: Float64Array, n: number, d: number): Float64Array {
    if (!this.net) throw new Error("fit before score");
    const values = tf.tidy(() => {
      const X = toTensor(test, n, d);
      return tf.neg(this.logits(X)).dataSync(); // low logit = anomalous
    });
    return Float64Array.from(values);
  }

  dispose(): void {
    this.net?.dispose();
  }
}
