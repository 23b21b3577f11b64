/**
 * Contrastive detector with learned data transformations: a set of small
 * networks produces transformed views of each sample (residual x + M(x) or
 * multiplicative x * sigmoid(M(x))), an encoder embeds original and views,
 * and the deterministic contrastive loss pulls each view toward its origin
 * while pushing the views apart.  The per-sample loss is the anomaly score.
 */

import * as tf from "@tensorflow/tfjs";

import type { Hyper } from "../config";
import { adamLoop, DenseStack, safeNorm, toTensor } from "../tensors";
import { num, str, ZooModel } from "./base";

export class NeuTraLad implements ZooModel {
  readonly name = "neutralad";
  private readonly hyper: Hyper;
  private encoder: DenseStack | null = null;
  private transforms: DenseStack[] = [];
  private dim = 0;

  constructor(hyper: Hyper) {
    this.hyper = hyper;
  }

  private embed(x: tf.Tensor2D): tf.Tensor2D {
    const z = this.encoder!.apply(x);
    return tf.div(z, safeNorm(z)) as tf.Tensor2D;
  }

  private view(x: tf.Tensor2D, k: number): tf.Tensor2D {
    const masked = this.transforms[k].apply(x);
    if (str(this.hyper, "transformation_type", "residual") === "residual") {
      return tf.add(x, masked) as tf.Tensor2D;
    }
    return tf.mul(x, tf.sigmoid(masked)) as tf.Tensor2D;
  }

  /** Per-sample deterministic contrastive loss; also the anomaly score. */
  private perSampleLoss(x: tf.Tensor2D): tf.Tensor1D {
    const temperature = num(this.hyper, "temperature", 0.1);
    const kTrans = this.transforms.length;
    const z = this.embed(x);
    const views = [];
    for (let k = 0; k < kTrans; k++) views.push(this.embed(this.view(x, k)));
    // cosine similarities on the unit sphere are plain dot products
    let total: tf.Tensor = tf.zeros([x.shape[0]]);
    for (let k = 0; k < kTrans; k++) {
      const simOrigin = tf.exp(
        tf.div(tf.sum(tf.mul(views[k], z), 1), temperature)
      );
      let denominator: tf.Tensor = simOrigin;
      for (let l = 0; l < kTrans; l++) {
        if (l === k) continue;
        denominator = tf.add(
          denominator,
          tf.exp(tf.div(tf.sum(tf.mul(views[k], views[l]), 1), temperature))
        );
      }
      total = tf.add(total, tf.neg(tf.log(tf.div(simOrigin, tf.add(denominator, 1e-12)))));
    }
    return total as tf.Tensor1D;
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    const latent = num(this.hyper, "lat_dim");
    const kTrans = num(this.hyper, "num_transforms", 11);
    const hidden = Math.max(2 * d, 8);
    this.encoder = new DenseStack(
      d,
      [
        { units: hidden, activation: "relu" },
        { units: hidden, activation: "relu" },
        { units: latent, activation: "linear" },
      ],
      seed
    );
    this.transforms = [];
    for (let k = 0; k < kTrans; k++) {
      this.transforms.push(
        new DenseStack(
          d,
          [
            { units: hidden, activation: "relu" },
            { units: d, activation: "linear" },
          ],
          seed + 31 * (k + 1)
        )
      );
    }
    const X = toTensor(train, n, d);
    const variables = [
      ...this.encoder.variables,
      ...this.transforms.flatMap((t) => t.variables),
    ];
    try {
      adamLoop(
        X,
        variables,
        (batch) => tf.tidy(() => tf.mean(this.perSampleLoss(batch)) as tf.Scalar),
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
    if (!this.encoder) throw new Error("fit before score");
    const values = tf.tidy(() => {
      const X = toTensor(test, n, d);
      return this.perSampleLoss(X).dataSync();
    });
    return Float64Array.from(values);
  }

  dispose(): void {
    this.encoder?.dispose();
    this.transforms.forEach((t) => t.dispose());
  }
}
