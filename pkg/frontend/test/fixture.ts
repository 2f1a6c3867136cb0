import { readFileSync } from "node:fs";

import type { StreamMessage } from "../src/types.js";

export interface RecordedCommand {
  type: string;
  heading_deg: number;
  sent_before_message_index: number;
  response: { status: number; body: unknown };
}

export interface RecordedSession {
  scenario_threats: number;
  command: RecordedCommand;
  messages: StreamMessage[];
}

export function loadRecordedSession(): RecordedSession {
  const url = new URL("./fixtures/session_stream.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as RecordedSession;
}
