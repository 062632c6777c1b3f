/** HTTP transport: POST /summarize per the wire protocol, GET /healthz. */

import express, { Express } from "express";

import { ServerConfig } from "./protocol.js";
import { handleRequest } from "./service.js";

export function createApp(config: ServerConfig): Express {
  const app = express();
  app.use(express.json({ limit: "1mb" }));

  app.get("/healthz", (_req, res) => {
    res.json({ model_id: config.modelId });
  });

  app.post("/summarize", (req, res) => {
    const { status, body } = handleRequest(req.body, config);
    res.status(status).json(body);
  });

  // malformed JSON bodies should produce a protocol error, not a stack trace
  app.use((err: Error, _req: express.Request, res: express.Response, next: express.NextFunction) => {
    if (res.headersSent) return next(err);
    res.status(400).json({ error: `bad request: ${err.message}` });
  });

  return app;
}
