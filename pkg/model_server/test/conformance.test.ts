/**
 * Protocol conformance: 50 randomized valid requests get schema-valid
 * responses; no_repeat_ngram=2 outputs contain no repeated bigram; the
 * max_tokens bound holds; greedy responses are identical across repeats.
 */

import { AddressInfo } from "node:net";
import { Server } from "node:http";

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { z } from "zod";

import { mulberry32 } from "../src/decode.js";
import { DEFAULT_CONFIG, DecodingConfig } from "../src/protocol.js";
import { createApp } from "../src/server.js";

const ResponseSchema = z.object({ summary: z.string() }).strict();

let server: Server;
let base: string;

beforeAll(async () => {
  const app = createApp(DEFAULT_CONFIG);
  await new Promise<void>((resolve) => {
    server = app.listen(0, "127.0.0.1", () => resolve());
  });
  base = `http://127.0.0.1:${(server.address() as AddressInfo).port}`;
});

afterAll(() => {
  server.close();
});

const WORDS = (
  "old video claims taliban afghanistan oxygen saudi reliance india ranked " +
  "hunger index vaccine corona virus 5g towers viral whatsapp forward bank " +
  "notes chip minister speech flood rescue helicopter photo temple statue"
).split(" ");

function randomText(rand: () => number): string {
  const n = 8 + Math.floor(rand() * 40);
  const words: string[] = [];
  for (let i = 0; i < n; i++) {
    words.push(WORDS[Math.floor(rand() * WORDS.length)]);
  }
  return words.join(" ");
}

function randomDecoding(rand: () => number): DecodingConfig {
  const strategies = ["greedy", "beam", "top_k", "top_p"] as const;
  const strategy = strategies[Math.floor(rand() * strategies.length)];
  const config: DecodingConfig = {
    strategy,
    max_tokens: 1 + Math.floor(rand() * 20),
    early_stopping: rand() < 0.5,
  };
  if (strategy === "beam") config.beam_width = 1 + Math.floor(rand() * 8);
  if (strategy === "top_k") config.top_k = 1 + Math.floor(rand() * 50);
  if (strategy === "top_p") config.top_p = 0.5 + rand() * 0.5;
  if (rand() < 0.5) config.no_repeat_ngram = 1 + Math.floor(rand() * 3);
  if (strategy === "top_k" || strategy === "top_p") {
    config.seed = Math.floor(rand() * 1000);
  }
  return config;
}

async function summarize(text: string, decoding: DecodingConfig) {
  const res = await fetch(`${base}/summarize`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ text, decoding }),
  });
  return { status: res.status, payload: await res.json() };
}

describe("protocol conformance", () => {
  it("answers 50 randomized valid requests with schema-valid responses", async () => {
    const rand = mulberry32(20260810);
    for (let i = 0; i < 50; i++) {
      const decoding = randomDecoding(rand);
      const { status, payload } = await summarize(randomText(rand), decoding);
      expect(status).toBe(200);
      const parsed = ResponseSchema.safeParse(payload);
      expect(parsed.success, JSON.stringify(payload)).toBe(true);
      const words = (payload as { summary: string }).summary.split(/\s+/).filter(Boolean);
      expect(words.length).toBeLessThanOrEqual(decoding.max_tokens);
    }
  });

  it("no_repeat_ngram=2 responses contain no repeated bigram", async () => {
    const rand = mulberry32(99);
    for (let i = 0; i < 20; i++) {
      const strategy = (["greedy", "beam"] as const)[i % 2];
      const decoding: DecodingConfig = {
        strategy,
        max_tokens: 25,
        early_stopping: false,
        no_repeat_ngram: 2,
        ...(strategy === "beam" ? { beam_width: 4 } : {}),
      };
      const { payload } = await summarize(randomText(rand) + " " + randomText(rand), decoding);
      const words = (payload as { summary: string }).summary.split(/\s+/).filter(Boolean);
      const grams = new Set<string>();
      for (let j = 0; j + 1 < words.length; j++) {
        const gram = `${words[j]} ${words[j + 1]}`;
        expect(grams.has(gram), `repeated bigram "${gram}"`).toBe(false);
        grams.add(gram);
      }
    }
  });

  it("greedy responses are identical across 3 repeats", async () => {
    const rand = mulberry32(7);
    for (let i = 0; i < 10; i++) {
      const text = randomText(rand);
      const decoding: DecodingConfig = {
        strategy: "greedy",
        max_tokens: 15,
        early_stopping: false,
      };
      const first = await summarize(text, decoding);
      const second = await summarize(text, decoding);
      const third = await summarize(text, decoding);
      expect(second.payload).toEqual(first.payload);
      expect(third.payload).toEqual(first.payload);
    }
  });
});
