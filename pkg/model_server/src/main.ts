import { parseArgs } from "node:util";

import { DEFAULT_CONFIG, MIN_INPUT_CHARS, ServerConfig } from "./protocol.js";
import { createApp } from "./server.js";
import { runStdio } from "./stdio.js";

function configFromArgv(argv: string[]): ServerConfig {
  const { values } = parseArgs({
    args: argv,
    options: {
      port: { type: "string", default: String(DEFAULT_CONFIG.port) },
      host: { type: "string", default: DEFAULT_CONFIG.host },
      stdio: { type: "boolean", default: false },
      "model-id": { type: "string", default: DEFAULT_CONFIG.modelId },
      "max-input-chars": { type: "string", default: String(DEFAULT_CONFIG.maxInputChars) },
      device: { type: "string", default: DEFAULT_CONFIG.device },
    },
  });
  const maxInputChars = Number(values["max-input-chars"]);
  if (!Number.isInteger(maxInputChars) || maxInputChars < MIN_INPUT_CHARS) {
    throw new Error(`--max-input-chars must be an integer >= ${MIN_INPUT_CHARS}`);
  }
  return {
    modelId: values["model-id"]!,
    host: values.host!,
    port: Number(values.port),
    stdio: values.stdio!,
    maxInputChars,
    device: values.device!,
  };
}

const config = configFromArgv(process.argv.slice(2));
if (config.stdio) {
  runStdio(config).then(() => process.exit(0));
} else {
  const app = createApp(config);
  app.listen(config.port, config.host, () => {
    console.error(`summarizer ${config.modelId} listening on http://${config.host}:${config.port}`);
  });
}
