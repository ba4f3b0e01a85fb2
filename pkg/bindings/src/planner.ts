/**
 * Planner sessions let an external model runtime drive the copy-and-verify
 * policy around its own forward passes: ask for a plan (stepwise, or a
 * copied draft), run the model on it, report the verified outputs back.
 *
 * A session reproduces the engine's decode loop exactly (same index, same
 * tie-break generator discipline, same truncation rules), so a host whose
 * model satisfies the consistency law gets byte-identical traces.
 */

import {
  DecodeTrace,
  InvalidConfigError,
  LengthMismatchError,
  RefDoc,
  SessionClosedError,
  StepRecord,
  TokenSeq,
  traceFromSteps,
} from "./core.js";
import { buildIndex, matchNgrams, ReferenceIndex } from "./refindex.js";
import { SplitRng } from "./rng.js";

export interface SessionOptions {
  /** output budget; the session closes once this many tokens are emitted */
  maxNewTokens?: number;
  /** token that ends generation; never emitted */
  stopToken?: number;
}

export interface StepwisePlan {
  kind: "stepwise";
}

export interface CopyPlan {
  kind: "copy";
  draft: number[];
  docId: string;
  pos: number;
}

export type Plan = StepwisePlan | CopyPlan;

/** Longest agreeing prefix of draft and the verification outputs. */
export function verifyDraft(outputs: TokenSeq, draft: TokenSeq): number {
  if (outputs.length !== draft.length + 1) {
    throw new LengthMismatchError(
      `expected ${draft.length + 1} outputs for a ${draft.length}-token draft, got ${outputs.length}`,
    );
  }
  let accepted = 0;
  while (accepted < draft.length && draft[accepted] === outputs[accepted]) {
    accepted++;
  }
  return accepted;
}

export class PlannerSession {
  readonly matchLen: number;
  readonly copyLen: number;
  readonly maxNewTokens: number;
  readonly stopToken?: number;

  private index: ReferenceIndex;
  private rng: SplitRng;
  private y: number[] = [];
  private steps: StepRecord[] = [];
  private pending: Plan | null = null;
  private halted = false;

  constructor(refs: RefDoc[], n: number, k: number, seed: number | bigint, options: SessionOptions = {}) {
    if (n < 1 || k < 1) throw new InvalidConfigError("n and k must be >= 1");
    const maxNew = options.maxNewTokens ?? 256;
    if (maxNew < 1) throw new InvalidConfigError("maxNewTokens must be >= 1");
    const ids = new Set(refs.map((d) => d.docId));
    if (ids.size !== refs.length) throw new InvalidConfigError("duplicate doc ids");
    this.matchLen = n;
    this.copyLen = k;
    this.maxNewTokens = maxNew;
    this.stopToken = options.stopToken;
    this.index = buildIndex(refs, n);
    this.rng = new SplitRng(seed);
  }

  get closed(): boolean {
    return this.halted || this.y.length >= this.maxNewTokens;
  }

  /** Tokens emitted so far: the concatenation of all accepted emissions. */
  output(): number[] {
    return [...this.y];
  }

  trace(): DecodeTrace {
    return traceFromSteps([...this.steps]);
  }

  /**
   * Plan the next step. Consumes one tie-break draw on a successful match;
   * repeated calls without an intervening acceptOutputs return the cached
   * plan without advancing the generator.
   */
  plan(): Plan {
    if (this.closed) throw new SessionClosedError("session is closed");
    if (this.pending) return this.pending;
    const match = matchNgrams(this.index, this.y, this.rng);
    if (match === null) {
      this.pending = { kind: "stepwise" };
    } else {
      const doc = this.index.document(match.docId).tokens;
      const draft = doc.slice(match.pos, match.pos + Math.min(this.copyLen, doc.length - match.pos));
      this.pending = { kind: "copy", draft: [...draft], docId: match.docId, pos: match.pos };
    }
    return this.pending;
  }

  /**
   * Report the model's verified outputs for the pending plan; returns the
   * tokens actually emitted (after acceptance, budget and stop-token
   * truncation) and appends them to the session output.
   */
  acceptOutputs(outputs: TokenSeq): number[] {
    if (this.closed) throw new SessionClosedError("session is closed");
    if (!this.pending) throw new SessionClosedError("no pending plan: call plan() first");
    const plan = this.pending;
    this.pending = null;

    if (plan.kind === "stepwise") {
      if (outputs.length !== 1) {
        this.pending = plan;
        throw new LengthMismatchError(`stepwise plan expects 1 output, got ${outputs.length}`);
      }
      const tok = outputs[0];
      if (this.stopToken !== undefined && tok === this.stopToken) {
        this.halted = true;
        return [];
      }
      this.y.push(tok);
      this.steps.push({ kind: "stepwise", inputTokens: 1, outputTokens: 1, truncated: false });
      return [tok];
    }

    let accepted: number;
    try {
      accepted = verifyDraft(outputs, plan.draft);
    } catch (err) {
      this.pending = plan;
      throw err;
    }
    let emit = outputs.slice(0, accepted + 1);
    let truncated = false;
    const budget = this.maxNewTokens - this.y.length;
    if (emit.length > budget) {
      emit = emit.slice(0, budget);
      truncated = true;
    }
    if (this.stopToken !== undefined) {
      const stopAt = emit.indexOf(this.stopToken);
      if (stopAt !== -1) {
        emit = emit.slice(0, stopAt);
        truncated = true;
        this.halted = true;
      }
    }
    if (emit.length > 0) {
      this.y.push(...emit);
      this.steps.push({
        kind: "copy",
        inputTokens: 1 + plan.draft.length,
        outputTokens: emit.length,
        docId: plan.docId,
        copyPos: plan.pos,
        accepted,
        truncated,
      });
    }
    return [...emit];
  }
}

/** Open a planner session over raw token lists; ids default to d0, d1, ... */
export function openSession(
  refs: TokenSeq[] | RefDoc[],
  n: number,
  k: number,
  seed: number | bigint,
  options: SessionOptions = {},
): PlannerSession {
  const docs: RefDoc[] = refs.map((r, i) =>
    Array.isArray(r) ? { docId: `d${i}`, tokens: r } : (r as RefDoc),
  );
  return new PlannerSession(docs, n, k, seed, options);
}
