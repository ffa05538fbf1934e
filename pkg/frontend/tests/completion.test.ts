import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { CompletionDropdown, CompletionScheduler, DEBOUNCE_MS } from "../src/completion.js";
import type { ApiClient } from "../src/api.js";
import type { CompletionPhase } from "../src/types.js";
import { replayClient, settle } from "./helpers.js";

function captureClient() {
  const calls: { text: string; onPhase: (p: CompletionPhase) => void }[] = [];
  const client: ApiClient = {
    registerEndpoint: async () => { throw new Error("unused"); },
    execute: async () => { throw new Error("unused"); },
    accept: async () => { throw new Error("unused"); },
    complete: async (req, onPhase) => {
      calls.push({ text: req.text, onPhase });
    },
  };
  return { client, calls };
}

describe("debounced completion scheduling", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("coalesces a burst of keystrokes into one request", async () => {
    const { client, calls } = captureClient();
    const scheduler = new CompletionScheduler(client, () => "ep", "object",
      () => undefined);
    scheduler.onKeystroke("K");
    scheduler.onKeystroke("Ke");
    scheduler.onKeystroke("Ken");
    expect(calls).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    expect(calls).toHaveLength(1);
    expect(calls[0].text).toBe("Ken");
  });

  it("debounce delay stays within the 100ms budget", () => {
    expect(DEBOUNCE_MS).toBeLessThanOrEqual(100);
  });

  it("drops responses that arrive after a newer keystroke", async () => {
    const { client, calls } = captureClient();
    const rendered: string[] = [];
    const scheduler = new CompletionScheduler(client, () => "ep", "object",
      (phase) => rendered.push(`${phase.phase}:${phase.suggestions.length}`));

    scheduler.onKeystroke("Yor");
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    const stale = calls[0];

    scheduler.onKeystroke("York");
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    const fresh = calls[1];

    fresh.onPhase({ phase: "tree", suggestions: [] });
    stale.onPhase({ phase: "tree",
                    suggestions: [{ display: "stale", kind: "literal",
                                    canonical: "stale" }] });
    expect(rendered).toEqual(["tree:0"]);
  });
});

describe("two-phase dropdown rendering", () => {
  it("paints tree matches immediately and appends bin matches", async () => {
    const client = replayClient();
    const dropdown = new CompletionDropdown(document, () => undefined);
    const paints: string[][] = [];
    await client.complete(
      { endpointId: "cities", slot: "object", text: "York" },
      (phase) => {
        dropdown.applyPhase(phase);
        paints.push(dropdown.items());
      },
    );
    await settle();
    expect(paints).toHaveLength(2);
    expect(paints[0]).toEqual(["York", "New York"]);
    expect(paints[1].slice(0, 2)).toEqual(["York", "New York"]);
    expect(paints[1]).toContain("Yorkshire");
    expect(paints[1].length).toBeGreaterThan(paints[0].length);
    const phases = Array.from(dropdown.element.children).map(
      (li) => (li as HTMLElement).dataset.phase);
    expect(phases.slice(0, 2)).toEqual(["tree", "tree"]);
    expect(phases.slice(2)).toContain("bins");
  });

  it("empty response renders no dropdown", async () => {
    const client = replayClient();
    const dropdown = new CompletionDropdown(document, () => undefined);
    await client.complete(
      { endpointId: "cities", slot: "object", text: "zzz-missing" },
      (phase) => dropdown.applyPhase(phase),
    );
    expect(dropdown.element.hidden).toBe(true);
  });

  it("clicking a suggestion hands it to the picker", async () => {
    const client = replayClient();
    const picked: string[] = [];
    const dropdown = new CompletionDropdown(document, (s) =>
      picked.push(s.canonical));
    await client.complete(
      { endpointId: "kennedy", slot: "predicate", text: "surname" },
      (phase) => dropdown.applyPhase(phase),
    );
    const first = dropdown.element.querySelector("li");
    first?.dispatchEvent(new MouseEvent("mousedown", { bubbles: true }));
    expect(picked).toEqual(["http://example.org/ns/surname"]);
  });
});
