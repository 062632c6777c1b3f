/** Transport-independent request handling shared by HTTP and stdio modes. */

import { generate } from "./decode.js";
import { ErrorResponse, RequestSchema, ServerConfig, SummaryResponse } from "./protocol.js";

export function handleRequest(
  raw: unknown,
  config: ServerConfig,
): { status: number; body: SummaryResponse | ErrorResponse } {
  const parsed = RequestSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    const where = issue.path.length > 0 ? `${issue.path.join(".")}: ` : "";
    return { status: 400, body: { error: `invalid request: ${where}${issue.message}` } };
  }
  const { text, decoding } = parsed.data;
  if (text.length > config.maxInputChars) {
    return {
      status: 400,
      body: { error: `input of ${text.length} chars exceeds max_input_chars (${config.maxInputChars})` },
    };
  }
  try {
    return { status: 200, body: { summary: generate(text, decoding) } };
  } catch (err) {
    return { status: 500, body: { error: `generation failed: ${String(err)}` } };
  }
}
