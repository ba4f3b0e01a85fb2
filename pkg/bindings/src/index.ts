export {
  DecodeTrace,
  EmptyInputError,
  formatTrace,
  InvalidConfigError,
  LengthMismatchError,
  RefDoc,
  SessionClosedError,
  StepKind,
  StepRecord,
  TokenOutOfRangeError,
  TokenSeq,
  traceFromSteps,
} from "./core.js";
export { deriveKey, fold, foldBytes, mix64, SplitRng } from "./rng.js";
export { buildIndex, matchNgrams, MatchResult, ReferenceIndex } from "./refindex.js";
export { HashLm, LmContract, NgramLm, ScriptedLm, scriptedFor, verify } from "./lm.js";
export {
  CopyPlan,
  openSession,
  Plan,
  PlannerSession,
  SessionOptions,
  StepwisePlan,
  verifyDraft,
} from "./planner.js";
export { aggregateStats, getMatchedTokens, inferDecodeSequence, TraceStats } from "./simulator.js";
export { DatasetSample, parseDataset } from "./dataset.js";
