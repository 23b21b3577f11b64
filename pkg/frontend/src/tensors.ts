/**
 * Small helpers on top of tfjs: seeded dense stacks, an Adam loop with
 * optional L2 penalty, and differentiable Gaussian log-densities for the
 * mixture-based detectors (dimensions there are tiny, so a closed-form
 * Cholesky over unstacked scalars is plenty).
 */

import * as tf from "@tensorflow/tfjs";

export class TrainingError extends Error {}

export function toTensor(rows: Float64Array, n: number, d: number): tf.Tensor2D {
  return tf.tensor2d(Float32Array.from(rows), [n, d]);
}

/**
 * Row norms with a finite gradient at the zero vector (tf.norm differentiates
 * to 0/0 there, which poisons anything downstream with NaN).
 */
export function safeNorm(x: tf.Tensor2D, axis = 1): tf.Tensor2D {
  return tf.sqrt(tf.add(tf.sum(tf.square(x), axis, true), 1e-12)) as tf.Tensor2D;
}

export interface DenseSpec {
  units: number;
  activation?: "relu" | "tanh" | "sigmoid" | "linear" | "leakyRelu";
  useBias?: boolean;
}

export class DenseStack {
  readonly weights: tf.Variable[] = [];
  readonly biases: (tf.Variable | null)[] = [];
  private readonly activations: string[] = [];

  constructor(inputDim: number, specs: DenseSpec[], seed: number) {
    let fanIn = inputDim;
    specs.forEach((spec, i) => {
      const bound = Math.sqrt(6 / (fanIn + spec.units));
      const init = tf.randomUniform([fanIn, spec.units], -bound, bound, "float32", seed + i);
      this.weights.push(tf.variable(init));
      this.biases.push(
        spec.useBias === false ? null : tf.variable(tf.zeros([spec.units]))
      );
      this.activations.push(spec.activation ?? "relu");
      fanIn = spec.units;
    });
  }

  apply(x: tf.Tensor2D): tf.Tensor2D {
    let h: tf.Tensor2D = x;
    for (let i = 0; i < this.weights.length; i++) {
      h = tf.matMul(h, this.weights[i]);
      const b = this.biases[i];
      if (b) h = tf.add(h, b) as tf.Tensor2D;
      const act = this.activations[i];
      if (act === "relu") h = tf.relu(h);
      else if (act === "tanh") h = tf.tanh(h);
      else if (act === "sigmoid") h = tf.sigmoid(h);
      else if (act === "leakyRelu") h = tf.leakyRelu(h, 0.1);
    }
    return h;
  }

  get variables(): tf.Variable[] {
    return [...this.weights, ...this.biases.filter((b): b is tf.Variable => b !== null)];
  }

  dispose(): void {
    this.variables.forEach((v) => v.dispose());
  }
}

/** Mirrored autoencoder taper, matching the engine's native detector. */
export function taperDims(inputDim: number, latent: number): number[] {
  const hidden = [Math.ceil(inputDim / 2), Math.ceil(inputDim / 4)].filter((h) => h > 0);
  return [...hidden, latent, ...hidden.slice().reverse(), inputDim];
}

export interface AdamLoopOptions {
  epochs: number;
  batchSize: number;
  learningRate: number;
  weightDecay?: number;
  seed: number;
  /** called with the epoch's mean loss; may stop the loop by returning false */
  onEpoch?: (epoch: number, loss: number) => boolean | void;
  /**
   * Runs outside the gradient tape before each step (e.g. adversarial-input
   * search needing its own input gradients); its result is handed to lossOn
   * as a constant and disposed afterwards.
   */
  prepareBatch?: (batch: tf.Tensor2D, epoch: number) => tf.Tensor2D | null;
}

import { Rand } from "./rng";

/**
 * Seeded mini-batch Adam over a caller-supplied loss.  Throws TrainingError
 * on a non-finite loss so runs can be marked failed rather than emitting
 * garbage scores.
 */
export function adamLoop(
  X: tf.Tensor2D,
  variables: tf.Variable[],
  lossOn: (batch: tf.Tensor2D, epoch: number, prepared: tf.Tensor2D | null) => tf.Scalar,
  opts: AdamLoopOptions
): number {
  const n = X.shape[0];
  const batch = opts.batchSize <= 0 ? n : Math.min(opts.batchSize, n);
  const optimizer = tf.train.adam(opts.learningRate);
  const rand = new Rand(BigInt(opts.seed) ^ 0x5eedn);
  const order = new Int32Array(n);
  let lastLoss = NaN;
  try {
    for (let epoch = 0; epoch < opts.epochs; epoch++) {
      for (let i = 0; i < n; i++) order[i] = i;
      rand.shuffle(order);
      let epochLoss = 0;
      let seen = 0;
      for (let start = 0; start < n; start += batch) {
        const take = Math.min(batch, n - start);
        const idx = tf.tensor1d(new Int32Array(order.subarray(start, start + take)), "int32");
        const rows = tf.gather(X, idx) as tf.Tensor2D;
        const prepared = opts.prepareBatch ? opts.prepareBatch(rows, epoch) : null;
        const lossScalar = optimizer.minimize(
          () => {
            let loss = lossOn(rows, epoch, prepared);
            if (opts.weightDecay) {
              const penalty = variables
                .map((v) => tf.sum(tf.square(v)))
                .reduce((a, b) => tf.add(a, b) as tf.Scalar);
              loss = tf.add(loss, tf.mul(opts.weightDecay, penalty)) as tf.Scalar;
            }
            return loss;
          },
          true,
          variables
        ) as tf.Scalar;
        const value = lossScalar.dataSync()[0];
        lossScalar.dispose();
        idx.dispose();
        rows.dispose();
        prepared?.dispose();
        if (!Number.isFinite(value)) {
          throw new TrainingError(`non-finite loss ${value} at epoch ${epoch}`);
        }
        epochLoss += value * take;
        seen += take;
      }
      lastLoss = epochLoss / seen;
      if (opts.onEpoch && opts.onEpoch(epoch, lastLoss) === false) break;
    }
  } finally {
    optimizer.dispose();
  }
  return lastLoss;
}

/**
 * Differentiable log N(z | mu, Sigma) for a batch of points and one
 * component, via a scalar-level Cholesky factorization.  dim is expected to
 * be tiny (latent + reconstruction features).
 */
export function gaussianLogDensity(
  z: tf.Tensor2D,
  mu: tf.Tensor1D,
  sigma: tf.Tensor2D,
  dim: number
): tf.Tensor1D {
  const rows: tf.Tensor[][] = [];
  const sig = tf.unstack(sigma).map((r) => tf.unstack(r));
  // L: lower-triangular Cholesky factor over scalars (smooth, no pivoting).
  const L: tf.Tensor[][] = [];
  for (let i = 0; i < dim; i++) {
    L.push([]);
    for (let j = 0; j <= i; j++) {
      let acc: tf.Tensor = sig[i][j];
      for (let k = 0; k < j; k++) {
        acc = tf.sub(acc, tf.mul(L[i][k], L[j][k]));
      }
      if (i === j) {
        L[i].push(tf.sqrt(tf.maximum(acc, 1e-6)));
      } else {
        L[i].push(tf.div(acc, L[j][j]));
      }
    }
    rows.push(L[i]);
  }
  let logDet: tf.Tensor = tf.scalar(0);
  for (let i = 0; i < dim; i++) logDet = tf.add(logDet, tf.log(L[i][i]));
  logDet = tf.mul(logDet, 2);

  // Forward-solve L y = (z - mu)^T column-wise; build y per dimension.
  const centered = tf.sub(z, mu); // [n, dim]
  const cols = tf.unstack(centered, 1); // dim tensors of [n]
  const y: tf.Tensor[] = [];
  for (let i = 0; i < dim; i++) {
    let acc: tf.Tensor = cols[i];
    for (let k = 0; k < i; k++) {
      acc = tf.sub(acc, tf.mul(L[i][k], y[k]));
    }
    y.push(tf.div(acc, L[i][i]));
  }
  let quad: tf.Tensor = tf.zerosLike(y[0]);
  for (let i = 0; i < dim; i++) quad = tf.add(quad, tf.square(y[i]));

  const logNorm = tf.add(tf.mul(0.5 * dim, Math.log(2 * Math.PI)), tf.mul(0.5, logDet));
  return tf.sub(tf.mul(-0.5, quad), logNorm) as tf.Tensor1D;
}
