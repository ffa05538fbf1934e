import type { ApiClient } from "./api.js";
import type { CompletionPhase, Slot, Suggestion } from "./types.js";

export const DEBOUNCE_MS = 80; // spec'd ceiling is 100ms per keystroke

/**
 * Debounced completion driver for one slot box.
 *
 * Each keystroke restarts the debounce timer and bumps a sequence
 * number; responses carry the sequence they were requested under and
 * are dropped when a newer keystroke has superseded them. At most one
 * request is in flight per slot - firing a new one aborts the previous.
 */
export class CompletionScheduler {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private seq = 0;
  private controller: AbortController | null = null;

  constructor(
    private client: ApiClient,
    private endpointId: () => string,
    private slot: Slot,
    private onPhase: (phase: CompletionPhase) => void,
    private delayMs: number = DEBOUNCE_MS,
  ) {}

  onKeystroke(text: string): void {
    this.seq += 1;
    if (this.timer !== null) clearTimeout(this.timer);
    this.controller?.abort();
    this.controller = null;
    const seq = this.seq;
    this.timer = setTimeout(() => void this.fire(text, seq), this.delayMs);
  }

  private async fire(text: string, seq: number): Promise<void> {
    if (seq !== this.seq) return; // superseded while waiting
    const controller = new AbortController();
    this.controller = controller;
    try {
      await this.client.complete(
        { endpointId: this.endpointId(), slot: this.slot, text },
        (phase) => {
          if (seq === this.seq) this.onPhase(phase);
        },
        controller.signal,
      );
    } catch (error) {
      if (!controller.signal.aborted) throw error;
    }
  }

  cancel(): void {
    this.seq += 1;
    if (this.timer !== null) clearTimeout(this.timer);
    this.controller?.abort();
  }
}

/** Dropdown list under a slot box; tree matches render the moment they
 * arrive, bin matches are appended by the second phase. */
export class CompletionDropdown {
  readonly element: HTMLUListElement;
  paints = 0;

  constructor(
    document: Document,
    private onPick: (suggestion: Suggestion) => void,
  ) {
    this.element = document.createElement("ul");
    this.element.className = "completion-dropdown";
    this.element.hidden = true;
  }

  applyPhase(phase: CompletionPhase): void {
    if (phase.phase === "tree") {
      this.element.replaceChildren();
    }
    for (const suggestion of phase.suggestions) {
      const item = this.element.ownerDocument.createElement("li");
      item.textContent = suggestion.display;
      item.dataset.kind = suggestion.kind;
      item.dataset.canonical = suggestion.canonical;
      item.dataset.phase = phase.phase;
      item.addEventListener("mousedown", (event) => {
        event.preventDefault();
        this.onPick(suggestion);
        this.hide();
      });
      this.element.appendChild(item);
    }
    this.paints += 1;
    this.element.hidden = this.element.childElementCount === 0;
  }

  hide(): void {
    this.element.hidden = true;
    this.element.replaceChildren();
  }

  items(): string[] {
    return Array.from(this.element.children).map((c) => c.textContent ?? "");
  }
}
