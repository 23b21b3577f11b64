/**
 * Portable seeded randomness, matching the evaluation engine's splitmix64
 * scheme bit for bit so both components derive identical decisions from the
 * same seeds.
 */

const MASK = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

export function mix64(z: bigint): bigint {
  z &= MASK;
  z = ((z ^ (z >> 30n)) * MIX1) & MASK;
  z = ((z ^ (z >> 27n)) * MIX2) & MASK;
  return z ^ (z >> 31n);
}

export function keyStream(seed: bigint | number, n: number): BigUint64Array {
  const s = BigInt(seed) & MASK;
  const out = new BigUint64Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = mix64((s + BigInt(i + 1) * GAMMA) & MASK);
  }
  return out;
}

/** Stable argsort of the key stream: the engine's canonical permutation. */
export function permutation(seed: bigint | number, n: number): Int32Array {
  const keys = keyStream(seed, n);
  const order = new Int32Array(n);
  for (let i = 0; i < n; i++) order[i] = i;
  return order.sort((a, b) => (keys[a] < keys[b] ? -1 : keys[a] > keys[b] ? 1 : a - b));
}

export function deriveSeed(seed: bigint | number, lane: number, index = 0): number {
  let z = mix64((BigInt(seed) & MASK) ^ 0xa3ad398f1cb6d2e5n);
  z = mix64((z + BigInt(lane) * GAMMA) & MASK);
  z = mix64((z + BigInt(index) * GAMMA) & MASK);
  return Number(z & 0x7fffffffn); // fits tfjs initializer seeds
}

/** Deterministic uniform/normal stream for plain-JS model code. */
export class Rand {
  private state: bigint;

  constructor(seed: bigint | number) {
    this.state = BigInt(seed) & MASK;
  }

  nextUint64(): bigint {
    this.state = (this.state + GAMMA) & MASK;
    return mix64(this.state);
  }

  /** Uniform in [0, 1) with 53-bit resolution. */
  uniform(): number {
    return Number(this.nextUint64() >> 11n) / 9007199254740992;
  }

  normal(): number {
    // Box-Muller; guard the log against a zero draw.
    const u = Math.max(this.uniform(), 1e-300);
    const v = this.uniform();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  }

  int(bound: number): number {
    return Number(this.nextUint64() % BigInt(bound));
  }

  shuffle(items: Int32Array): Int32Array {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      const tmp = items[i];
      items[i] = items[j];
      items[j] = tmp;
    }
    return items;
  }
}
