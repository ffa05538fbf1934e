import { beforeEach, describe, expect, it } from "vitest";

import { createApp, type App } from "../src/app.js";
import type { ReplayApiClient } from "../src/api.js";
import { replayClient, settle, type } from "./helpers.js";

function slotInput(app: App, slot: string, row = 0): HTMLInputElement {
  const rows = app.root.querySelectorAll(".pattern-row");
  const input = rows[row].querySelector<HTMLInputElement>(
    `input[data-slot="${slot}"]`);
  if (!input) throw new Error(`no ${slot} input`);
  return input;
}

async function draftKennedysQuery(app: App): Promise<void> {
  type(slotInput(app, "subject"), "?person");
  const predicate = slotInput(app, "predicate");
  type(predicate, "surname");
  await settle(20); // debounce 0 -> timer + two replay phases
  const option = app.root.querySelector<HTMLElement>(
    ".slot-predicate .completion-dropdown li");
  if (!option) throw new Error("no predicate suggestion rendered");
  option.dispatchEvent(new MouseEvent("mousedown", { bubbles: true }));
  type(slotInput(app, "object"), "Kennedys");
}

describe("end-to-end against the recorded service", () => {
  let client: ReplayApiClient;
  let app: App;

  beforeEach(() => {
    document.body.innerHTML = '<div id="root"></div>';
    client = replayClient();
    app = createApp(document.getElementById("root") as HTMLElement, client, {
      endpointId: "kennedy",
      debounceMs: 0,
    });
  });

  it("typing York paints tree matches first, bins second", async () => {
    app.endpointInput.value = "cities";
    const object = slotInput(app, "object");
    const dropdown = app.root.querySelector<HTMLElement>(
      ".slot-object .completion-dropdown")!;
    const paints: string[][] = [];
    const observer = new MutationObserver(() => {
      paints.push(Array.from(dropdown.children).map(
        (li) => li.textContent ?? ""));
    });
    observer.observe(dropdown, { childList: true });
    type(object, "York");
    await new Promise((resolve) => setTimeout(resolve, 5));
    await settle(20);
    observer.disconnect();
    const nonEmpty = paints.filter((p) => p.length > 0);
    expect(nonEmpty[0]).toEqual(["York", "New York"]);
    const last = nonEmpty[nonEmpty.length - 1];
    expect(last.slice(0, 2)).toEqual(["York", "New York"]);
    expect(last).toContain("Yorkshire");
    expect(last).toContain("York Minster");
  });

  it("run button only enables once every triple is valid", async () => {
    expect(app.runButton.disabled).toBe(true);
    type(slotInput(app, "subject"), "?person");
    expect(app.runButton.disabled).toBe(true);
    type(slotInput(app, "predicate"), "surname"); // bare predicate: invalid
    type(slotInput(app, "object"), "Kennedys");
    expect(app.runButton.disabled).toBe(true);
    type(slotInput(app, "predicate"), "<http://example.org/ns/surname>");
    expect(app.runButton.disabled).toBe(false);
  });

  it("accepting the Kennedy suggestion refreshes the table without /execute",
     async () => {
    await draftKennedysQuery(app);
    expect(app.runButton.disabled).toBe(false);
    const response = await app.run();
    expect(response.result.rows).toHaveLength(0);
    expect(client.calls.execute).toBe(1);

    const banners = app.suggestionsBox.querySelectorAll(".suggestion-banner");
    expect(banners.length).toBeGreaterThan(0);
    expect(banners[0].textContent).toContain("12 answers");

    const accept = banners[0].querySelector("button")!;
    accept.click();
    await settle(20);

    const rows = app.answersBox.querySelectorAll("table.answers tr");
    expect(rows).toHaveLength(13); // header + 12 people
    expect(client.calls.execute).toBe(1); // served from prefetched rows
    expect(client.calls.accept).toBe(1);
    expect(app.suggestionsBox.hidden).toBe(true);
  });

  it("keyword filter john narrows the answer table", async () => {
    await draftKennedysQuery(app);
    await app.run();
    const banner = app.suggestionsBox.querySelector(".suggestion-banner button")!;
    (banner as HTMLButtonElement).click();
    await settle(20);

    const filter = app.root.querySelector<HTMLInputElement>(".answer-filter")!;
    type(filter, "john");
    const rows = Array.from(
      app.answersBox.querySelectorAll("table.answers tr")).slice(1);
    expect(rows).toHaveLength(1);
    expect(rows[0].textContent).toContain("John_Kennedy");
  });

  it("hiding a column removes it from the table", async () => {
    await draftKennedysQuery(app);
    await app.run();
    (app.suggestionsBox.querySelector(
      ".suggestion-banner button") as HTMLButtonElement).click();
    await settle(20);
    const toggle = app.answersBox.querySelector<HTMLInputElement>(
      '.column-toggles input[data-column="person"]')!;
    toggle.checked = false;
    toggle.dispatchEvent(new Event("change", { bubbles: true }));
    expect(app.answersBox.querySelectorAll("th")).toHaveLength(0);
  });

  it("dragging an answer cell fills a query slot", async () => {
    await draftKennedysQuery(app);
    await app.run();
    (app.suggestionsBox.querySelector(
      ".suggestion-banner button") as HTMLButtonElement).click();
    await settle(20);

    const cell = app.answersBox.querySelector("table.answers td")!;
    const stash: Record<string, string> = {};
    const dataTransfer = {
      setData: (kind: string, value: string) => { stash[kind] = value; },
      getData: (kind: string) => stash[kind] ?? "",
    };
    const dragStart = new Event("dragstart", { bubbles: true });
    Object.defineProperty(dragStart, "dataTransfer", { value: dataTransfer });
    cell.dispatchEvent(dragStart);

    const object = slotInput(app, "object");
    const drop = new Event("drop", { bubbles: true });
    Object.defineProperty(drop, "dataTransfer", { value: dataTransfer });
    object.dispatchEvent(drop);
    expect(object.value).toBe(cell.textContent);
    expect(app.triples[0].object.picked?.kind).toBe("uri");
  });
});
