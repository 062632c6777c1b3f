/**
 * Wire protocol schemas shared with the claim-checking pipeline.
 *
 * Request:  {"text": string, "decoding": {...}}
 * Response: {"summary": string} | {"error": string}
 *
 * `seed` is an optional extension for the sampling strategies so tests can
 * pin their randomness; clients that omit it get seed 0.
 */

import { z } from "zod";

export const DecodingSchema = z
  .object({
    strategy: z.enum(["greedy", "beam", "top_k", "top_p"]),
    beam_width: z.number().int().positive().optional(),
    no_repeat_ngram: z.number().int().positive().optional(),
    top_k: z.number().int().positive().optional(),
    top_p: z.number().gt(0).lte(1).optional(),
    max_tokens: z.number().int().positive(),
    early_stopping: z.boolean(),
    seed: z.number().int().nonnegative().optional(),
  })
  .strict()
  .superRefine((value, ctx) => {
    if (value.strategy === "beam" && value.beam_width === undefined) {
      ctx.addIssue({ code: "custom", message: "beam decoding requires beam_width" });
    }
    if (value.strategy !== "beam" && value.beam_width !== undefined) {
      ctx.addIssue({ code: "custom", message: "beam_width is only valid for beam decoding" });
    }
    if (value.strategy === "top_k" && value.top_k === undefined) {
      ctx.addIssue({ code: "custom", message: "top_k decoding requires top_k" });
    }
    if (value.strategy !== "top_k" && value.top_k !== undefined) {
      ctx.addIssue({ code: "custom", message: "top_k is only valid for top_k decoding" });
    }
    if (value.strategy === "top_p" && value.top_p === undefined) {
      ctx.addIssue({ code: "custom", message: "top_p decoding requires top_p" });
    }
    if (value.strategy !== "top_p" && value.top_p !== undefined) {
      ctx.addIssue({ code: "custom", message: "top_p is only valid for top_p decoding" });
    }
  });

export const RequestSchema = z
  .object({
    text: z.string(),
    decoding: DecodingSchema,
  })
  .strict();

export type DecodingConfig = z.infer<typeof DecodingSchema>;
export type SummarizeRequest = z.infer<typeof RequestSchema>;

export interface SummaryResponse {
  summary: string;
}

export interface ErrorResponse {
  error: string;
}

export interface ServerConfig {
  modelId: string;
  host: string;
  port: number;
  stdio: boolean;
  maxInputChars: number;
  device: string;
}

export const MIN_INPUT_CHARS = 280; // a full-length post must fit

export const DEFAULT_CONFIG: ServerConfig = {
  modelId: "salience-condenser-1",
  host: "127.0.0.1",
  port: 8750,
  stdio: false,
  maxInputChars: 2000,
  device: "cpu",
};
