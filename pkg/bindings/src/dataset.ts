/** Minimal reader for the engine's canonical JSONL dataset format. */

import { RefDoc, TokenSeq } from "./core.js";

export interface DatasetSample {
  sampleId: string;
  scenario: string;
  prompt: TokenSeq;
  target: TokenSeq | null;
  docs: RefDoc[];
}

export function parseDataset(text: string): DatasetSample[] {
  const samples: DatasetSample[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let obj: any;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new Error(`line ${i + 1}: ${(err as Error).message}`);
    }
    for (const field of ["sample_id", "scenario", "prompt", "target", "docs"]) {
      if (!(field in obj)) throw new Error(`line ${i + 1}: missing field ${field}`);
    }
    samples.push({
      sampleId: String(obj.sample_id),
      scenario: obj.scenario,
      prompt: obj.prompt,
      target: obj.target,
      docs: obj.docs.map((d: any) => ({ docId: String(d.id), tokens: d.tokens })),
    });
  }
  return samples;
}
