/**
 * N-gram position index over the reference documents, with the engine's
 * longest-matching-prefix ranking and seeded tie-breaking. Candidate order,
 * prefix-extension measurement and draw discipline must match the engine
 * exactly (docs/formats.md).
 */

import { RefDoc, TokenSeq } from "./core.js";
import { SplitRng } from "./rng.js";

export interface MatchResult {
  docId: string;
  /** document index immediately after the matched n-gram: first token to copy */
  pos: number;
  prefixExt: number;
}

interface Occurrence {
  ordinal: number;
  end: number;
}

export class ReferenceIndex {
  readonly docs: RefDoc[];
  readonly gramLen: number;
  private readonly positions: Map<string, Occurrence[]>;
  private readonly byId: Map<string, RefDoc>;

  constructor(docs: RefDoc[], gramLen: number) {
    if (gramLen < 1) throw new RangeError("gramLen must be >= 1");
    this.docs = docs;
    this.gramLen = gramLen;
    this.positions = new Map();
    this.byId = new Map(docs.map((d) => [d.docId, d]));
    docs.forEach((doc, ordinal) => {
      for (let end = gramLen; end <= doc.tokens.length; end++) {
        const key = doc.tokens.slice(end - gramLen, end).join(",");
        let bucket = this.positions.get(key);
        if (!bucket) {
          bucket = [];
          this.positions.set(key, bucket);
        }
        bucket.push({ ordinal, end });
      }
    });
  }

  document(docId: string): RefDoc {
    const doc = this.byId.get(docId);
    if (!doc) throw new Error(`unknown doc_id ${docId}`);
    return doc;
  }

  lookup(key: TokenSeq): Occurrence[] | undefined {
    return this.positions.get(key.join(","));
  }
}

export function buildIndex(docs: RefDoc[], n: number): ReferenceIndex {
  return new ReferenceIndex(docs, n);
}

function prefixExtension(doc: TokenSeq, gramStart: number, y: TokenSeq, suffixStart: number): number {
  let ext = 0;
  while (
    ext < gramStart &&
    ext < suffixStart &&
    doc[gramStart - 1 - ext] === y[suffixStart - 1 - ext]
  ) {
    ext++;
  }
  return ext;
}

/**
 * Match the last n generated tokens against the references. One rng draw is
 * consumed on every successful match (tie or not); spans ending at a
 * document's last token are excluded.
 */
export function matchNgrams(index: ReferenceIndex, y: TokenSeq, rng: SplitRng): MatchResult | null {
  const n = index.gramLen;
  if (y.length < n) return null;
  const occurrences = index.lookup(y.slice(y.length - n));
  if (!occurrences) return null;

  let best: Occurrence[] = [];
  let bestExt = -1;
  const suffixStart = y.length - n;
  for (const occ of occurrences) {
    const doc = index.docs[occ.ordinal];
    if (occ.end >= doc.tokens.length) continue; // nothing left to copy
    const ext = prefixExtension(doc.tokens, occ.end - n, y, suffixStart);
    if (ext > bestExt) {
      bestExt = ext;
      best = [occ];
    } else if (ext === bestExt) {
      best.push(occ);
    }
  }
  if (best.length === 0) return null;

  const pick = best[rng.nextBelow(best.length)];
  return { docId: index.docs[pick.ordinal].docId, pos: pick.end, prefixExt: bestExt };
}
