import { describe, expect, it } from "vitest";
import { deriveKey, fold, foldBytes, mix64, SplitRng } from "../src/index.js";

// Frozen vectors from docs/formats.md: these pin bit-parity with the engine.
describe("mix64", () => {
  it("matches the frozen vectors", () => {
    expect(mix64(0n)).toBe(0n);
    expect(mix64(1n)).toBe(0x5692161d100b05e5n);
    expect(mix64(2n)).toBe(0xdbd238973a2b148an);
    expect(mix64(42n)).toBe(0xa759ea27d4727622n);
    expect(mix64(0x9e3779b97f4a7c15n)).toBe(0xe220a8397b1dcdafn);
    expect(mix64(0xffffffffffffffffn)).toBe(0xb4d055fcf2cbbd7bn);
  });
});

describe("key derivation", () => {
  it("matches the frozen vectors", () => {
    expect(fold(0n, 0n)).toBe(0x48218226ff3cd4bfn);
    expect(fold(1n, 2n)).toBe(0xf2826f98653e9e57n);
    expect(foldBytes(0n, new Uint8Array())).toBe(0x48218226ff3cd4bfn);
    expect(foldBytes(0n, new TextEncoder().encode("s0"))).toBe(0xb544b4d2769af662n);
    expect(foldBytes(7n, new TextEncoder().encode("sample-42"))).toBe(0x2593d585cfc28452n);
    expect(deriveKey(42, "cell", 1, 18, "s0")).toBe(0xdabf089a431b8fb3n);
  });
});

describe("SplitRng", () => {
  it("matches the frozen stream", () => {
    const r = new SplitRng(42);
    expect([r.nextU64(), r.nextU64(), r.nextU64()]).toEqual([
      0x989b3f130a063869n,
      0x290db4bf2570ded7n,
      0x2a990be63a01b2d5n,
    ]);
    expect(new SplitRng(42).split("tie").nextU64()).toBe(0x403d2a4a1412c8fbn);
    const below = new SplitRng(7);
    expect(Array.from({ length: 8 }, () => below.nextBelow(10))).toEqual([
      5, 5, 8, 5, 7, 4, 8, 2,
    ]);
  });

  it("splitting does not advance the parent", () => {
    const a = new SplitRng(9);
    const first = a.nextU64();
    const b = new SplitRng(9);
    b.split("child");
    expect(b.nextU64()).toBe(first);
  });

  it("rejects non-positive bounds", () => {
    expect(() => new SplitRng(0).nextBelow(0)).toThrow(RangeError);
  });
});
