import type { QuerySuggestion } from "./types.js";

/** "Did you mean ..." banners with a one-click accept button each. */
export function renderSuggestionBanners(
  container: HTMLElement,
  suggestions: QuerySuggestion[],
  onAccept: (suggestion: QuerySuggestion) => void,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (suggestions.length === 0) {
    container.hidden = true;
    return;
  }
  container.hidden = false;
  for (const suggestion of suggestions) {
    const banner = doc.createElement("div");
    banner.className = `suggestion-banner suggestion-${suggestion.kind}`;
    const message = doc.createElement("span");
    message.textContent = suggestion.message;
    const details = doc.createElement("details");
    const summary = doc.createElement("summary");
    summary.textContent = "show query";
    const pre = doc.createElement("pre");
    pre.textContent = suggestion.query;
    details.append(summary, pre);
    const button = doc.createElement("button");
    button.textContent = "accept";
    button.dataset.index = String(suggestion.index);
    button.addEventListener("click", () => onAccept(suggestion));
    banner.append(message, button, details);
    container.appendChild(banner);
  }
}
