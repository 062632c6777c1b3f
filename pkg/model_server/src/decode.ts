/**
 * Decoding strategies over the condenser model's step scores.
 *
 * Greedy and beam search are fully deterministic; top-k and top-p sample
 * from a seeded generator (seed 0 unless the request supplies one). All
 * strategies honour `max_tokens` as a hard bound on generated tokens and
 * `no_repeat_ngram` as a ban on any n-gram occurring twice in the output.
 */

import { CondenserModel, EOS, TokenScore } from "./model.js";
import { DecodingConfig } from "./protocol.js";

interface Hypothesis {
  tokens: string[];
  score: number;
  finished: boolean;
}

/** Tokens that would complete an already-seen n-gram of `tokens`. */
export function bannedNext(tokens: string[], n: number | undefined): Set<string> {
  const banned = new Set<string>();
  if (!n || tokens.length < n - 1) return banned;
  const suffix = tokens.slice(tokens.length - (n - 1));
  for (let i = 0; i + n <= tokens.length; i++) {
    const gram = tokens.slice(i, i + n);
    if (gram.slice(0, n - 1).every((w, j) => w === suffix[j])) {
      banned.add(gram[n - 1]);
    }
  }
  return banned;
}

function viableCandidates(model: CondenserModel, hyp: Hypothesis, config: DecodingConfig): TokenScore[] {
  const banned = bannedNext(hyp.tokens, config.no_repeat_ngram);
  const out: TokenScore[] = [];
  for (const cand of model.nextScores(hyp.tokens)) {
    if (cand.token === EOS) {
      // never end before emitting anything (when there is anything to emit)
      if (hyp.tokens.length === 0 && model.vocab.length > 0) continue;
      out.push(cand);
    } else if (!banned.has(cand.token)) {
      out.push(cand);
    }
  }
  if (out.length === 0) return [{ token: EOS, score: 0 }];
  return out;
}

function softmax(candidates: TokenScore[]): { token: string; p: number }[] {
  const max = Math.max(...candidates.map((c) => c.score));
  const exps = candidates.map((c) => ({ token: c.token, p: Math.exp(c.score - max) }));
  const total = exps.reduce((acc, c) => acc + c.p, 0);
  return exps.map((c) => ({ token: c.token, p: c.p / total }));
}

/** Deterministic 32-bit PRNG so sampled responses are reproducible. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function sampleFrom(dist: { token: string; p: number }[], rand: () => number): string {
  const r = rand();
  let acc = 0;
  for (const { token, p } of dist) {
    acc += p;
    if (r < acc) return token;
  }
  return dist[dist.length - 1].token;
}

function decodeGreedy(model: CondenserModel, config: DecodingConfig): string[] {
  const hyp: Hypothesis = { tokens: [], score: 0, finished: false };
  while (hyp.tokens.length < config.max_tokens) {
    const candidates = viableCandidates(model, hyp, config);
    let best = candidates[0];
    for (const cand of candidates) {
      if (cand.score > best.score) best = cand;
    }
    if (best.token === EOS) break;
    hyp.tokens.push(best.token);
  }
  return hyp.tokens;
}

function decodeBeam(model: CondenserModel, config: DecodingConfig): string[] {
  const width = config.beam_width ?? 1;
  let beams: Hypothesis[] = [{ tokens: [], score: 0, finished: false }];
  for (let step = 0; step < config.max_tokens; step++) {
    const pool: Hypothesis[] = beams.filter((h) => h.finished);
    for (const hyp of beams) {
      if (hyp.finished) continue;
      const candidates = viableCandidates(model, hyp, config)
        .sort((a, b) => b.score - a.score)
        .slice(0, width + 1);
      for (const cand of candidates) {
        if (cand.token === EOS) {
          pool.push({ tokens: hyp.tokens, score: hyp.score + cand.score, finished: true });
        } else {
          pool.push({
            tokens: [...hyp.tokens, cand.token],
            score: hyp.score + cand.score,
            finished: false,
          });
        }
      }
    }
    pool.sort((a, b) => b.score - a.score);
    beams = pool.slice(0, width);
    if (beams.every((h) => h.finished)) break;
    if (config.early_stopping && beams[0].finished) break;
  }
  const finished = beams.filter((h) => h.finished);
  const pick = (finished.length > 0 ? finished : beams)[0];
  return pick.tokens;
}

function decodeSampling(model: CondenserModel, config: DecodingConfig): string[] {
  const rand = mulberry32(config.seed ?? 0);
  const tokens: string[] = [];
  while (tokens.length < config.max_tokens) {
    const hyp: Hypothesis = { tokens, score: 0, finished: false };
    let dist = softmax(viableCandidates(model, hyp, config)).sort((a, b) => b.p - a.p);
    if (config.strategy === "top_k") {
      dist = dist.slice(0, config.top_k ?? dist.length);
    } else {
      const threshold = config.top_p ?? 1;
      const kept: typeof dist = [];
      let acc = 0;
      for (const entry of dist) {
        kept.push(entry);
        acc += entry.p;
        if (acc >= threshold) break;
      }
      dist = kept;
    }
    const total = dist.reduce((acc, c) => acc + c.p, 0);
    const renormalized = dist.map((c) => ({ token: c.token, p: c.p / total }));
    const token = sampleFrom(renormalized, rand);
    if (token === EOS) break;
    tokens.push(token);
  }
  return tokens;
}

export function generate(text: string, config: DecodingConfig): string {
  const model = new CondenserModel(text);
  let tokens: string[];
  switch (config.strategy) {
    case "greedy":
      tokens = decodeGreedy(model, config);
      break;
    case "beam":
      tokens = decodeBeam(model, config);
      break;
    case "top_k":
    case "top_p":
      tokens = decodeSampling(model, config);
      break;
  }
  return tokens.join(" ");
}
