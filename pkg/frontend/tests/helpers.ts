import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { ReplayApiClient, type ReplayFixture } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export function loadReplayFixture(): ReplayFixture {
  const raw = readFileSync(join(here, "..", "fixtures", "replay.json"), "utf-8");
  return JSON.parse(raw) as ReplayFixture;
}

export function replayClient(): ReplayApiClient {
  return new ReplayApiClient(loadReplayFixture());
}

/** Flush timers and microtasks until debounced requests and both replay
 * phases have landed. */
export async function settle(rounds = 6): Promise<void> {
  for (let i = 0; i < rounds; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function type(input: HTMLInputElement, text: string): void {
  input.value = text;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}
