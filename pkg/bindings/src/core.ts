/** Shared types and errors for the planner surface. */

export type TokenSeq = readonly number[];

export interface RefDoc {
  docId: string;
  tokens: TokenSeq;
}

export type StepKind = "stepwise" | "copy";

export interface StepRecord {
  kind: StepKind;
  inputTokens: number;
  outputTokens: number;
  docId?: string;
  copyPos?: number;
  accepted?: number;
  truncated: boolean;
}

export interface DecodeTrace {
  steps: StepRecord[];
  numSteps: number;
  numTriggers: number;
  numAccepted: number;
  numOutputTokens: number;
}

export function traceFromSteps(steps: StepRecord[]): DecodeTrace {
  const copies = steps.filter((s) => s.kind === "copy");
  return {
    steps,
    numSteps: steps.length,
    numTriggers: copies.length,
    numAccepted: copies.reduce((acc, s) => acc + (s.accepted ?? 0), 0),
    numOutputTokens: steps.reduce((acc, s) => acc + s.outputTokens, 0),
  };
}

/** Engine trace export format, byte-identical to the Python side. */
export function formatTrace(trace: DecodeTrace): string {
  const lines = ["step_index,kind,input_tokens,output_tokens,accepted,doc_id,pos"];
  trace.steps.forEach((s, i) => {
    if (s.kind === "copy") {
      lines.push(`${i},copy,${s.inputTokens},${s.outputTokens},${s.accepted},${s.docId},${s.copyPos}`);
    } else {
      lines.push(`${i},stepwise,1,1,,,`);
    }
  });
  return lines.map((l) => l + "\n").join("");
}

export class InvalidConfigError extends Error {}
export class SessionClosedError extends Error {}
export class LengthMismatchError extends Error {}
export class TokenOutOfRangeError extends Error {}
export class EmptyInputError extends Error {}
