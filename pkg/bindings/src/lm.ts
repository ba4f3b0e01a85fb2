/**
 * Host-side mock models. These mirror the engine's fixtures bit-for-bit so
 * the parity suite can drive sessions and compare traces against the
 * engine's CLI on the same inputs.
 */

import { TokenOutOfRangeError, TokenSeq } from "./core.js";
import { GOLDEN, mix64 } from "./rng.js";

const MASK64 = (1n << 64n) - 1n;

export interface LmContract {
  vocabSize: number;
  nextArgmax(context: TokenSeq): number;
}

function checkTokens(tokens: TokenSeq, vocabSize: number): void {
  for (const t of tokens) {
    if (t < 0 || t >= vocabSize) {
      throw new TokenOutOfRangeError(`token ${t} outside [0, ${vocabSize})`);
    }
  }
}

/** Score a drafted continuation: element j is the argmax after context + draft[:j]. */
export function verify(lm: LmContract, context: TokenSeq, draft: TokenSeq): number[] {
  checkTokens(draft, lm.vocabSize);
  const ctx = [...context];
  const outputs = [lm.nextArgmax(ctx)];
  for (const tok of draft) {
    ctx.push(tok);
    outputs.push(lm.nextArgmax(ctx));
  }
  return outputs;
}

/** Pure hash of the last `window` context tokens (fixture recipe). */
export class HashLm implements LmContract {
  constructor(
    public vocabSize: number,
    public window: number = 4,
    public seed: number | bigint = 0,
  ) {
    if (vocabSize < 1) throw new RangeError("vocabSize must be >= 1");
    if (window < 1) throw new RangeError("window must be >= 1");
  }

  nextArgmax(context: TokenSeq): number {
    checkTokens(context, this.vocabSize);
    let state = mix64(BigInt(this.seed) & MASK64);
    const start = Math.max(0, context.length - this.window);
    for (let i = start; i < context.length; i++) {
      state = mix64(state ^ ((BigInt(context[i]) + GOLDEN) & MASK64));
    }
    return Number(state % BigInt(this.vocabSize));
  }
}

/** Replays a fixed target regardless of context content, then the stop token. */
export class ScriptedLm implements LmContract {
  constructor(
    public promptLen: number,
    public target: TokenSeq,
    public stopToken: number,
    public vocabSize: number,
  ) {}

  nextArgmax(context: TokenSeq): number {
    checkTokens(context, this.vocabSize);
    if (context.length < this.promptLen) {
      throw new RangeError(
        `context of ${context.length} tokens is shorter than the ${this.promptLen}-token prompt`,
      );
    }
    const pos = context.length - this.promptLen;
    return pos < this.target.length ? this.target[pos] : this.stopToken;
  }
}

/** Derive the scripted model for a sample the same way the engine CLI does. */
export function scriptedFor(prompt: TokenSeq, target: TokenSeq, refs: TokenSeq[]): ScriptedLm {
  let high = 0;
  for (const seq of [prompt, target, ...refs]) {
    for (const t of seq) if (t > high) high = t;
  }
  return new ScriptedLm(prompt.length, target, high + 1, high + 2);
}

/** Count-based n-gram argmax with backoff; ties go to the smallest token id. */
export class NgramLm implements LmContract {
  /** counts[L] maps an L-token context key to per-token counts */
  private counts: Map<string, Map<number, number>>[];

  constructor(
    public vocabSize: number,
    public order: number = 2,
  ) {
    if (vocabSize < 1) throw new RangeError("vocabSize must be >= 1");
    if (order < 1) throw new RangeError("order must be >= 1");
    this.counts = Array.from({ length: order }, () => new Map());
  }

  fit(corpus: TokenSeq[]): this {
    for (const seq of corpus) {
      checkTokens(seq, this.vocabSize);
      for (let i = 0; i < seq.length; i++) {
        for (let ctxLen = 0; ctxLen <= Math.min(this.order - 1, i); ctxLen++) {
          const key = seq.slice(i - ctxLen, i).join(",");
          let bucket = this.counts[ctxLen].get(key);
          if (!bucket) {
            bucket = new Map();
            this.counts[ctxLen].set(key, bucket);
          }
          bucket.set(seq[i], (bucket.get(seq[i]) ?? 0) + 1);
        }
      }
    }
    return this;
  }

  /** One space-separated id sequence per line; blank lines skipped. */
  fitCorpusText(text: string): this {
    const corpus = text
      .split("\n")
      .map((line) => line.trim())
      .filter((line) => line.length > 0)
      .map((line) => line.split(/\s+/).map(Number));
    return this.fit(corpus);
  }

  nextArgmax(context: TokenSeq): number {
    checkTokens(context, this.vocabSize);
    for (let ctxLen = Math.min(this.order - 1, context.length); ctxLen >= 0; ctxLen--) {
      const key = context.slice(context.length - ctxLen).join(",");
      const bucket = this.counts[ctxLen].get(key);
      if (bucket && bucket.size > 0) {
        let bestTok = -1;
        let bestCount = -1;
        for (const [tok, count] of bucket) {
          if (count > bestCount || (count === bestCount && tok < bestTok)) {
            bestTok = tok;
            bestCount = count;
          }
        }
        return bestTok;
      }
    }
    return 0;
  }
}
