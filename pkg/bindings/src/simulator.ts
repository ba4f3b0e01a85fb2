/**
 * Model-free trace reconstruction and statistics, ported from the engine
 * for host-side analysis. Output must agree with the engine record for
 * record given the same seed.
 */

import { DecodeTrace, EmptyInputError, RefDoc, StepRecord, TokenSeq, traceFromSteps } from "./core.js";
import { buildIndex, matchNgrams } from "./refindex.js";
import { SplitRng } from "./rng.js";

/** Longest common prefix of doc.tokens[pos:] and y[step:]. */
export function getMatchedTokens(doc: RefDoc, pos: number, y: TokenSeq, step: number): number {
  if (pos < 0 || pos > doc.tokens.length) throw new RangeError(`pos ${pos} outside [0, ${doc.tokens.length}]`);
  if (step < 0 || step > y.length) throw new RangeError(`step ${step} outside [0, ${y.length}]`);
  let count = 0;
  while (
    pos + count < doc.tokens.length &&
    step + count < y.length &&
    doc.tokens[pos + count] === y[step + count]
  ) {
    count++;
  }
  return count;
}

/** Reconstruct the accelerated decode trace for a known target sequence. */
export function inferDecodeSequence(
  y: TokenSeq,
  refs: RefDoc[],
  n: number,
  k: number,
  seed: number | bigint = 0,
): DecodeTrace {
  if (n < 1 || k < 1) throw new RangeError("n and k must be >= 1");
  const index = buildIndex(refs, n);
  const rng = new SplitRng(seed);
  const steps: StepRecord[] = [];
  let step = 0;
  while (step < y.length) {
    const match = matchNgrams(index, y.slice(0, step), rng);
    if (match === null) {
      step += 1;
      steps.push({ kind: "stepwise", inputTokens: 1, outputTokens: 1, truncated: false });
      continue;
    }
    const doc = index.document(match.docId);
    const draftLen = Math.min(k, doc.tokens.length - match.pos);
    const numValid = Math.min(k, getMatchedTokens(doc, match.pos, y, step));
    let numOutput = numValid + 1;
    let truncated = false;
    if (step + numOutput > y.length) {
      numOutput = y.length - step;
      truncated = true;
    }
    step += numOutput;
    steps.push({
      kind: "copy",
      inputTokens: 1 + draftLen,
      outputTokens: numOutput,
      docId: match.docId,
      copyPos: match.pos,
      accepted: numValid,
      truncated,
    });
  }
  return traceFromSteps(steps);
}

export interface TraceStats {
  triggersPerSample: number;
  acceptedPerSample: number;
  stepsPerSample: number;
  outputsPerSample: number;
  compressionRatio: number;
}

/** Arithmetic means of per-trace totals; ratio is mean outputs over mean steps. */
export function aggregateStats(traces: DecodeTrace[]): TraceStats {
  if (traces.length === 0) throw new EmptyInputError("cannot aggregate zero traces");
  const m = traces.length;
  const steps = traces.reduce((a, t) => a + t.numSteps, 0) / m;
  const outputs = traces.reduce((a, t) => a + t.numOutputTokens, 0) / m;
  return {
    triggersPerSample: traces.reduce((a, t) => a + t.numTriggers, 0) / m,
    acceptedPerSample: traces.reduce((a, t) => a + t.numAccepted, 0) / m,
    stepsPerSample: steps,
    outputsPerSample: outputs,
    compressionRatio: steps > 0 ? outputs / steps : 1.0,
  };
}
