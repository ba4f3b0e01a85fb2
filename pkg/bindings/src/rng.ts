/**
 * Deterministic 64-bit mixing and the splittable counter-based generator.
 *
 * This is a bit-exact port of the engine's recipes (see docs/formats.md in
 * the repository root); every constant and update rule must match or trace
 * parity with the engine breaks.
 */

const MASK64 = (1n << 64n) - 1n;
export const GOLDEN = 0x9e3779b97f4a7c15n;
const MIX_A = 0xbf58476d1ce4e5b9n;
const MIX_B = 0x94d049bb133111ebn;

/** Avalanching 64-bit permutation (multiply-xor-shift finalizer). */
export function mix64(x: bigint): bigint {
  x &= MASK64;
  x = ((x ^ (x >> 30n)) * MIX_A) & MASK64;
  x = ((x ^ (x >> 27n)) * MIX_B) & MASK64;
  return x ^ (x >> 31n);
}

/** Absorb one integer word into a derivation key. */
export function fold(key: bigint, word: bigint): bigint {
  return mix64(key ^ mix64((word + GOLDEN) & MASK64));
}

/** Absorb a byte string: 8 bytes per word, little-endian, then the length. */
export function foldBytes(key: bigint, data: Uint8Array): bigint {
  for (let i = 0; i < data.length; i += 8) {
    let word = 0n;
    for (let j = Math.min(8, data.length - i) - 1; j >= 0; j--) {
      word = (word << 8n) | BigInt(data[i + j]);
    }
    key = fold(key, word);
  }
  return fold(key, BigInt(data.length));
}

export type SplitWord = number | bigint | string;

function absorb(key: bigint, words: SplitWord[]): bigint {
  for (const w of words) {
    if (typeof w === "string") {
      key = foldBytes(key, new TextEncoder().encode(w));
    } else {
      key = fold(key, BigInt(w) & MASK64);
    }
  }
  return key;
}

/** Derive a stream key from a seed and an ordered list of split words. */
export function deriveKey(seed: number | bigint, ...words: SplitWord[]): bigint {
  return absorb(mix64(BigInt(seed) & MASK64), words);
}

/**
 * Counter-based generator: draw i of stream `key` is mix64(key + i*GOLDEN).
 * Splitting derives a child key without advancing the parent counter.
 */
export class SplitRng {
  key: bigint;
  counter: bigint;

  constructor(seed: number | bigint, ...words: SplitWord[]) {
    this.key = deriveKey(seed, ...words);
    this.counter = 0n;
  }

  nextU64(): bigint {
    this.counter += 1n;
    return mix64((this.key + this.counter * GOLDEN) & MASK64);
  }

  /** Integer in [0, bound); consumes exactly one u64 draw. */
  nextBelow(bound: number): number {
    if (bound <= 0) throw new RangeError("bound must be positive");
    return Number(this.nextU64() % BigInt(bound));
  }

  split(...words: SplitWord[]): SplitRng {
    const child = Object.create(SplitRng.prototype) as SplitRng;
    child.key = absorb(this.key, words);
    child.counter = 0n;
    return child;
  }
}
