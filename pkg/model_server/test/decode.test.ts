import { describe, expect, it } from "vitest";

import { bannedNext, generate, mulberry32 } from "../src/decode.js";
import { CondenserModel, tokenizeWords } from "../src/model.js";
import { DecodingConfig } from "../src/protocol.js";

const CLAIM =
  "Oxygen donated from Saudi Arabia relabelled in India by Reliance, share " +
  "this with your contacts and make this viral, let the world know";

function beam(overrides: Partial<DecodingConfig> = {}): DecodingConfig {
  return {
    strategy: "beam",
    beam_width: 6,
    no_repeat_ngram: 2,
    max_tokens: 15,
    early_stopping: true,
    ...overrides,
  };
}

function bigrams(words: string[]): string[] {
  const out: string[] = [];
  for (let i = 0; i + 1 < words.length; i++) out.push(`${words[i]} ${words[i + 1]}`);
  return out;
}

describe("bannedNext", () => {
  it("bans exact token reuse for n=1", () => {
    expect(bannedNext(["a", "b", "a"], 1)).toEqual(new Set(["a", "b"]));
  });

  it("bans completions of seen bigrams for n=2", () => {
    expect(bannedNext(["a", "b", "a"], 2)).toEqual(new Set(["b"]));
  });

  it("no bans when the prefix is shorter than n-1", () => {
    expect(bannedNext([], 2).size).toBe(0);
    expect(bannedNext(["a"], 3).size).toBe(0);
  });
});

describe("generate", () => {
  it("respects max_tokens for every strategy", () => {
    const configs: DecodingConfig[] = [
      { strategy: "greedy", max_tokens: 5, early_stopping: false },
      beam({ max_tokens: 5 }),
      { strategy: "top_k", top_k: 50, max_tokens: 5, early_stopping: false, seed: 1 },
      { strategy: "top_p", top_p: 0.92, max_tokens: 5, early_stopping: false, seed: 1 },
    ];
    for (const config of configs) {
      const words = generate(CLAIM, config).split(/\s+/).filter(Boolean);
      expect(words.length).toBeLessThanOrEqual(5);
    }
  });

  it("never repeats a bigram under no_repeat_ngram=2", () => {
    const summary = generate(CLAIM + " " + CLAIM, beam({ max_tokens: 30 }));
    const grams = bigrams(summary.split(/\s+/).filter(Boolean));
    expect(new Set(grams).size).toBe(grams.length);
  });

  it("never repeats a word under no_repeat_ngram=1", () => {
    const summary = generate(CLAIM, beam({ no_repeat_ngram: 1, max_tokens: 30 }));
    const words = summary.split(/\s+/).filter(Boolean);
    expect(new Set(words).size).toBe(words.length);
  });

  it("greedy is deterministic", () => {
    const config: DecodingConfig = { strategy: "greedy", max_tokens: 15, early_stopping: false };
    const first = generate(CLAIM, config);
    expect(generate(CLAIM, config)).toBe(first);
    expect(generate(CLAIM, config)).toBe(first);
  });

  it("beam is deterministic", () => {
    const first = generate(CLAIM, beam());
    expect(generate(CLAIM, beam())).toBe(first);
  });

  it("sampling is reproducible for a fixed seed and varies across seeds", () => {
    const base: DecodingConfig = {
      strategy: "top_k", top_k: 50, max_tokens: 12, early_stopping: false,
    };
    const a = generate(CLAIM, { ...base, seed: 7 });
    const b = generate(CLAIM, { ...base, seed: 7 });
    expect(b).toBe(a);
    const seeds = new Set(
      Array.from({ length: 10 }, (_, s) => generate(CLAIM, { ...base, seed: s })),
    );
    expect(seeds.size).toBeGreaterThan(1);
  });

  it("summary words come from the input vocabulary", () => {
    const vocab = new Set(tokenizeWords(CLAIM));
    const summary = generate(CLAIM, beam());
    for (const word of summary.split(/\s+/).filter(Boolean)) {
      expect(vocab.has(word)).toBe(true);
    }
  });

  it("empty input produces an empty summary", () => {
    expect(generate("", beam())).toBe("");
  });

  it("produces a non-empty summary for real text", () => {
    expect(generate(CLAIM, beam()).length).toBeGreaterThan(0);
    expect(generate(CLAIM, { strategy: "greedy", max_tokens: 15, early_stopping: false }).length)
      .toBeGreaterThan(0);
  });
});

describe("model", () => {
  it("scoring is pure", () => {
    const model = new CondenserModel(CLAIM);
    const a = model.nextScores(["oxygen"]);
    const b = model.nextScores(["oxygen"]);
    expect(a).toEqual(b);
  });

  it("mulberry32 streams are reproducible", () => {
    const r1 = mulberry32(42);
    const r2 = mulberry32(42);
    for (let i = 0; i < 100; i++) expect(r1()).toBe(r2());
  });
});
