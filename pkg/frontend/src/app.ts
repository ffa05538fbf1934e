import { HttpApiClient, ReplayApiClient, type ApiClient } from "./api.js";
import { CompletionDropdown, CompletionScheduler, DEBOUNCE_MS } from "./completion.js";
import {
  emptyView,
  renderAnswerTable,
  TERM_MIME,
  type AnswerView,
} from "./answerTable.js";
import {
  draftValid,
  emptyModifiers,
  emptyTriple,
  serializeDraft,
  termFromSuggestion,
  type DraftModifiers,
  type SlotState,
  type TripleDraft,
} from "./queryDraft.js";
import { renderSuggestionBanners } from "./suggestions.js";
import type { ApiResult, Cell, ExecuteResponse, QuerySuggestion, Slot } from "./types.js";

export interface AppOptions {
  endpointId?: string;
  debounceMs?: number;
}

const SLOTS: Slot[] = ["subject", "predicate", "object"];

export class App {
  triples: TripleDraft[] = [];
  modifiers: DraftModifiers = emptyModifiers();
  view: AnswerView = emptyView();
  lastResult: ApiResult | null = null;
  suggestions: QuerySuggestion[] = [];
  sessionId: string | undefined;
  epoch = 0;

  readonly endpointInput: HTMLInputElement;
  readonly registerButton: HTMLButtonElement;
  readonly statusLine: HTMLElement;
  readonly patternsBox: HTMLElement;
  readonly runButton: HTMLButtonElement;
  readonly suggestionsBox: HTMLElement;
  readonly answersBox: HTMLElement;

  constructor(
    readonly root: HTMLElement,
    readonly client: ApiClient,
    private options: AppOptions = {},
  ) {
    const doc = root.ownerDocument;
    root.classList.add("scribe");
    root.innerHTML = `
      <section class="endpoint-bar">
        <input class="endpoint-input" placeholder="endpoint URL or fixture name" />
        <button class="register-button">register</button>
        <span class="status"></span>
      </section>
      <section class="patterns"></section>
      <section class="modifier-panel">
        <label><input type="checkbox" class="mod-distinct" /> distinct</label>
        <label>count <input class="mod-count" size="6" /></label>
        <label>group by <input class="mod-group" size="8" /></label>
        <label>order by <input class="mod-order" size="6" /></label>
        <select class="mod-order-dir"><option value="asc">asc</option>
          <option value="desc">desc</option></select>
        <label>limit <input class="mod-limit" size="4" /></label>
        <label>offset <input class="mod-offset" size="4" /></label>
      </section>
      <section class="controls">
        <button class="add-pattern">+ pattern</button>
        <button class="run-button" disabled>Run</button>
      </section>
      <section class="suggestions" hidden></section>
      <section class="answers"></section>
    `;
    this.endpointInput = query<HTMLInputElement>(root, ".endpoint-input");
    this.registerButton = query<HTMLButtonElement>(root, ".register-button");
    this.statusLine = query(root, ".status");
    this.patternsBox = query(root, ".patterns");
    this.runButton = query<HTMLButtonElement>(root, ".run-button");
    this.suggestionsBox = query(root, ".suggestions");
    this.answersBox = query(root, ".answers");
    if (options.endpointId) this.endpointInput.value = options.endpointId;

    this.registerButton.addEventListener("click", () => void this.register());
    query<HTMLButtonElement>(root, ".add-pattern").addEventListener(
      "click", () => this.addTripleRow());
    this.runButton.addEventListener("click", () => void this.run());
    this.bindModifiers(doc);
    this.addTripleRow();
  }

  endpointId(): string {
    return this.endpointInput.value.trim();
  }

  private bindModifiers(_doc: Document): void {
    const bind = (selector: string, apply: (value: string) => void) => {
      const input = query<HTMLInputElement>(this.root, selector);
      input.addEventListener("input", () => apply(input.value));
    };
    const distinct = query<HTMLInputElement>(this.root, ".mod-distinct");
    distinct.addEventListener("change", () => {
      this.modifiers.distinct = distinct.checked;
    });
    bind(".mod-count", (v) => (this.modifiers.countVar = v));
    bind(".mod-group", (v) => (this.modifiers.groupBy = v));
    bind(".mod-order", (v) => (this.modifiers.orderBy = v));
    const dir = query<HTMLSelectElement>(this.root, ".mod-order-dir");
    dir.addEventListener("change", () => {
      this.modifiers.orderDir = dir.value as "asc" | "desc";
    });
    bind(".mod-limit", (v) => (this.modifiers.limit = v));
    bind(".mod-offset", (v) => (this.modifiers.offset = v));
  }

  async register(): Promise<void> {
    const value = this.endpointId();
    if (!value) return;
    this.statusLine.textContent = "initializing…";
    try {
      const body = value.startsWith("http")
        ? { url: value, id: value }
        : { fixture: value, id: value };
      const response = await this.client.registerEndpoint(body);
      this.statusLine.textContent =
        `ready: ${response.initStats.literalCount} literals cached`;
    } catch (error) {
      this.statusLine.textContent = `registration failed: ${String(error)}`;
    }
  }

  addTripleRow(): TripleDraft {
    const doc = this.root.ownerDocument;
    const triple = emptyTriple();
    this.triples.push(triple);
    const row = doc.createElement("div");
    row.className = "pattern-row";
    for (const slot of SLOTS) {
      row.appendChild(this.buildSlotBox(doc, triple, slot));
    }
    const remove = doc.createElement("button");
    remove.textContent = "×";
    remove.className = "remove-pattern";
    remove.addEventListener("click", () => {
      this.triples = this.triples.filter((t) => t !== triple);
      row.remove();
      this.refreshRunButton();
    });
    row.appendChild(remove);
    this.patternsBox.appendChild(row);
    this.refreshRunButton();
    return triple;
  }

  private buildSlotBox(
    doc: Document,
    triple: TripleDraft,
    slot: Slot,
  ): HTMLElement {
    const wrap = doc.createElement("span");
    wrap.className = `slot slot-${slot}`;
    const input = doc.createElement("input");
    input.placeholder = slot;
    input.className = "slot-input";
    input.dataset.slot = slot;
    const state: SlotState = triple[slot];

    const dropdown = new CompletionDropdown(doc, (suggestion) => {
      state.text = suggestion.display;
      state.picked = termFromSuggestion(suggestion);
      input.value = suggestion.display;
      this.refreshRunButton();
    });
    const scheduler = new CompletionScheduler(
      this.client,
      () => this.endpointId(),
      slot,
      (phase) => dropdown.applyPhase(phase),
      this.options.debounceMs ?? DEBOUNCE_MS,
    );

    input.addEventListener("input", () => {
      state.text = input.value;
      state.picked = undefined;
      this.refreshRunButton();
      scheduler.onKeystroke(input.value);
    });
    input.addEventListener("blur", () => {
      setTimeout(() => dropdown.hide(), 150);
    });
    input.addEventListener("dragover", (event) => event.preventDefault());
    input.addEventListener("drop", (event) => {
      const raw = event.dataTransfer?.getData(TERM_MIME);
      if (!raw) return;
      event.preventDefault();
      const cell = JSON.parse(raw) as Cell;
      state.text = cell.display;
      state.picked = cell.type === "uri"
        ? { kind: "uri", value: cell.value }
        : { kind: "literal", value: cell.value, language: cell["xml:lang"] };
      input.value = cell.display;
      this.refreshRunButton();
    });

    wrap.append(input, dropdown.element);
    return wrap;
  }

  refreshRunButton(): void {
    this.runButton.disabled = !draftValid(this.triples) || !this.endpointId();
  }

  queryText(): string {
    return serializeDraft(this.triples, this.modifiers);
  }

  async run(): Promise<ExecuteResponse> {
    const response = await this.client.execute({
      endpointId: this.endpointId(),
      query: this.queryText(),
      sessionId: this.sessionId,
    });
    this.sessionId = response.sessionId;
    this.epoch = response.epoch;
    this.lastResult = response.result;
    this.suggestions = response.suggestions;
    this.view = emptyView();
    this.renderAnswers();
    renderSuggestionBanners(this.suggestionsBox, this.suggestions, (s) =>
      void this.acceptSuggestion(s));
    return response;
  }

  async acceptSuggestion(suggestion: QuerySuggestion): Promise<void> {
    if (!this.sessionId) return;
    const response = await this.client.accept({
      sessionId: this.sessionId,
      epoch: this.epoch,
      suggestionIndex: suggestion.index,
    });
    // answers were prefetched server-side; the table refreshes without a
    // new execution
    this.lastResult = response.result;
    this.suggestions = [];
    renderSuggestionBanners(this.suggestionsBox, [], () => undefined);
    this.view = emptyView();
    this.renderAnswers();
  }

  renderAnswers(): void {
    if (this.lastResult === null) return;
    renderAnswerTable(
      this.answersBox,
      this.lastResult,
      this.view,
      () => this.renderAnswers(),
    );
    let filter = this.root.querySelector<HTMLInputElement>(".answer-filter");
    if (filter === null) {
      filter = this.root.ownerDocument.createElement("input");
      filter.className = "answer-filter";
      filter.placeholder = "keyword search";
      filter.addEventListener("input", () => {
        this.view.filter = filter!.value;
        this.renderAnswers();
      });
    }
    this.answersBox.prepend(filter);
  }
}

function query<T extends HTMLElement>(root: HTMLElement, selector: string): T {
  const found = root.querySelector<T>(selector);
  if (found === null) throw new Error(`missing element ${selector}`);
  return found;
}

export function createApp(
  root: HTMLElement,
  client: ApiClient,
  options: AppOptions = {},
): App {
  return new App(root, client, options);
}

// browser boot; tests construct the app directly against a replay client
if (typeof document !== "undefined") {
  const mount = document.getElementById("scribe-app");
  if (mount !== null) {
    const params = new URLSearchParams(document.location.search);
    void (async () => {
      let client: ApiClient;
      if (params.has("replay")) {
        const fixture = await (await fetch("fixtures/replay.json")).json();
        client = new ReplayApiClient(fixture);
      } else {
        client = new HttpApiClient("");
      }
      createApp(mount, client, { endpointId: params.get("endpoint") ?? "" });
    })();
  }
}
