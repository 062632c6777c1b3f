/** Stdio transport: one JSON request per stdin line, one response per stdout line. */

import readline from "node:readline";

import { ServerConfig } from "./protocol.js";
import { handleRequest } from "./service.js";

export function runStdio(config: ServerConfig, input = process.stdin, output = process.stdout): Promise<void> {
  const rl = readline.createInterface({ input, terminal: false });
  rl.on("line", (line) => {
    const trimmed = line.trim();
    if (!trimmed) return;
    let raw: unknown;
    try {
      raw = JSON.parse(trimmed);
    } catch {
      output.write(JSON.stringify({ error: "request line is not valid JSON" }) + "\n");
      return;
    }
    const { body } = handleRequest(raw, config);
    output.write(JSON.stringify(body) + "\n");
  });
  return new Promise((resolve) => rl.on("close", () => resolve()));
}
