/**
 * Adversarially learned detector: encoder and generator trained as a
 * bidirectional GAN with three discriminators enforcing joint, data-space
 * and latent-space consistency.  The anomaly score is the L1 distance
 * between intermediate data-space-discriminator features of (x, x) and
 * (x, G(E(x))).
 */

import * as tf from "@tensorflow/tfjs";

import type { Hyper } from "../config";
import { Rand } from "../rng";
import { DenseStack, toTensor, TrainingError } from "../tensors";
import { num, ZooModel } from "./base";

export class Alad implements ZooModel {
  readonly name = "alad";
  private readonly hyper: Hyper;
  private encoder: DenseStack | null = null;
  private generator: DenseStack | null = null;
  private dxzX: DenseStack | null = null;
  private dxzZ: DenseStack | null = null;
  private dxzJoint: DenseStack | null = null;
  private dxxFeat: DenseStack | null = null;
  private dxxHead: DenseStack | null = null;
  private dzz: DenseStack | null = null;
  private dim = 0;

  constructor(hyper: Hyper) {
    this.hyper = hyper;
  }

  private bce(logits: tf.Tensor, target: number): tf.Scalar {
    const t = tf.fill(logits.shape, target);
    const loss = tf.add(
      tf.sub(tf.relu(logits), tf.mul(logits, t)),
      tf.log1p(tf.exp(tf.neg(tf.abs(logits))))
    );
    return tf.mean(loss) as tf.Scalar;
  }

  private dxz(x: tf.Tensor2D, z: tf.Tensor2D): tf.Tensor2D {
    const joint = tf.concat([this.dxzX!.apply(x), this.dxzZ!.apply(z)], 1);
    return this.dxzJoint!.apply(joint as tf.Tensor2D);
  }

  private dxxFeatures(a: tf.Tensor2D, b: tf.Tensor2D): tf.Tensor2D {
    return this.dxxFeat!.apply(tf.concat([a, b], 1) as tf.Tensor2D);
  }

  fit(train: Float64Array, n: number, d: number, seed: number): void {
    this.dim = d;
    const latent = num(this.hyper, "lat_dim");
    const hidden = num(this.hyper, "hidden_dim", Math.max(2 * d, 16));
    const lr = num(this.hyper, "learning_rate");
    const epochs = num(this.hyper, "epoch");
    const batchSize = Math.min(num(this.hyper, "batch"), n);

    this.encoder = new DenseStack(
      d,
      [{ units: hidden, activation: "leakyRelu" }, { units: latent, activation: "linear" }],
      seed
    );
    this.generator = new DenseStack(
      latent,
      [{ units: hidden, activation: "relu" }, { units: d, activation: "linear" }],
      seed + 1
    );
    this.dxzX = new DenseStack(d, [{ units: hidden, activation: "leakyRelu" }], seed + 2);
    this.dxzZ = new DenseStack(latent, [{ units: hidden, activation: "leakyRelu" }], seed + 3);
    this.dxzJoint = new DenseStack(
      2 * hidden,
      [{ units: hidden, activation: "leakyRelu" }, { units: 1, activation: "linear" }],
      seed + 4
    );
    this.dxxFeat = new DenseStack(2 * d, [{ units: hidden, activation: "leakyRelu" }], seed + 5);
    this.dxxHead = new DenseStack(hidden, [{ units: 1, activation: "linear" }], seed + 6);
    this.dzz = new DenseStack(
      2 * latent,
      [{ units: hidden, activation: "leakyRelu" }, { units: 1, activation: "linear" }],
      seed + 7
    );

    const dVariables = [
      ...this.dxzX.variables,
      ...this.dxzZ.variables,
      ...this.dxzJoint.variables,
      ...this.dxxFeat.variables,
      ...this.dxxHead.variables,
      ...this.dzz.variables,
    ];
    const gVariables = [...this.encoder.variables, ...this.generator.variables];
    // GAN convention: slow first moment for stability
    const dOptimizer = tf.train.adam(lr, 0.5);
    const gOptimizer = tf.train.adam(lr, 0.5);

    const X = toTensor(train, n, d);
    const rand = new Rand(BigInt(seed) ^ 0xa1adn);
    const order = new Int32Array(n);
    try {
      for (let epoch = 0; epoch < epochs; epoch++) {
        for (let i = 0; i < n; i++) order[i] = i;
        rand.shuffle(order);
        for (let start = 0; start < n; start += batchSize) {
          const take = Math.min(batchSize, n - start);
          const idx = tf.tensor1d(new Int32Array(order.subarray(start, start + take)), "int32");
          const x = tf.gather(X, idx) as tf.Tensor2D;
          idx.dispose();
          const noise = new Float32Array(take * latent);
          for (let i = 0; i < noise.length; i++) noise[i] = rand.normal();
          const z = tf.tensor2d(noise, [take, latent]);

          const pieces = (real: number, fake: number) =>
            tf.tidy(() => {
              const ex = this.encoder!.apply(x);
              const gz = this.generator!.apply(z);
              const rec = this.generator!.apply(ex);
              const egz = this.encoder!.apply(gz);
              const jointLoss = tf.add(
                this.bce(this.dxz(x, ex), real),
                this.bce(this.dxz(gz, z), fake)
              );
              const dataLoss = tf.add(
                this.bce(this.dxxHead!.apply(this.dxxFeatures(x, x)), real),
                this.bce(this.dxxHead!.apply(this.dxxFeatures(x, rec)), fake)
              );
              const latentLoss = tf.add(
                this.bce(this.dzz!.apply(tf.concat([z, z], 1) as tf.Tensor2D), real),
                this.bce(this.dzz!.apply(tf.concat([z, egz], 1) as tf.Tensor2D), fake)
              );
              return tf.add(tf.add(jointLoss, dataLoss), latentLoss) as tf.Scalar;
            });

          const dLoss = dOptimizer.minimize(() => pieces(1, 0), true, dVariables) as tf.Scalar;
          const gLoss = gOptimizer.minimize(() => pieces(0, 1), true, gVariables) as tf.Scalar;
          const dv = dLoss.dataSync()[0];
          const gv = gLoss.dataSync()[0];
          dLoss.dispose();
          gLoss.dispose();
          x.dispose();
          z.dispose();
          if (!Number.isFinite(dv) || !Number.isFinite(gv)) {
            throw new TrainingError(
              `non-finite adversarial loss at epoch ${epoch} (D=${dv}, G=${gv})`
            );
          }
        }
      }
    } finally {
      X.dispose();
      dOptimizer.dispose();
      gOptimizer.dispose();
    }
  }

  score(test: Float64Array, n: number, d: number): Float64Array {
    if (!this.encoder) throw new Error("fit before score");
    const values = tf.tidy(() => {
      const X = toTensor(test, n, d);
      const rec = this.generator!.apply(this.encoder!.apply(X));
      const fTrue = this.dxxFeatures(X, X);
      const fRec = this.dxxFeatures(X, rec);
      return tf.sum(tf.abs(tf.sub(fTrue, fRec)), 1).dataSync();
    });
    return Float64Array.from(values);
  }

  dispose(): void {
    [
      this.encoder, this.generator, this.dxzX, this.dxzZ,
      this.dxzJoint, this.dxxFeat, this.dxxHead, this.dzz,
    ].forEach((net) => net?.dispose());
  }
}
