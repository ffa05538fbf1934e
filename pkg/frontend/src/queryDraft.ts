import type { Slot, Suggestion } from "./types.js";

export interface SlotTerm {
  kind: "variable" | "uri" | "literal";
  value: string;
  language?: string;
}

export interface SlotState {
  text: string;
  /** set when the user picked a completion; cleared on further typing */
  picked?: SlotTerm;
}

export interface TripleDraft {
  subject: SlotState;
  predicate: SlotState;
  object: SlotState;
}

export interface DraftModifiers {
  distinct: boolean;
  countVar: string;
  groupBy: string;
  orderBy: string;
  orderDir: "asc" | "desc";
  limit: string;
  offset: string;
}

export function emptyTriple(): TripleDraft {
  return { subject: { text: "" }, predicate: { text: "" }, object: { text: "" } };
}

export function emptyModifiers(): DraftModifiers {
  return { distinct: false, countVar: "", groupBy: "", orderBy: "",
           orderDir: "asc", limit: "", offset: "" };
}

export function termFromSuggestion(s: Suggestion): SlotTerm {
  if (s.kind === "predicate") return { kind: "uri", value: s.canonical };
  return { kind: "literal", value: s.canonical, language: s.language };
}

/** What the typed text denotes, or null when it denotes nothing valid.
 * Bare words are literals, which only object slots may hold; subjects and
 * predicates must be variables, <uris>, or a picked completion. */
export function slotTerm(state: SlotState, slot: Slot): SlotTerm | null {
  const text = state.text.trim();
  if (text === "") return null;
  if (state.picked && state.picked.value !== "" ) return state.picked;
  if (text.startsWith("?")) {
    const name = text.slice(1);
    return /^[A-Za-z_][A-Za-z0-9_]*$/.test(name)
      ? { kind: "variable", value: name }
      : null;
  }
  if (text.startsWith("<") && text.endsWith(">") && text.length > 2) {
    return { kind: "uri", value: text.slice(1, -1) };
  }
  if (/^https?:\/\/\S+$/.test(text)) {
    return { kind: "uri", value: text };
  }
  const quoted = text.match(/^"(.*)"(?:@([A-Za-z-]+))?$/);
  if (quoted) {
    return slot === "object"
      ? { kind: "literal", value: quoted[1], language: quoted[2] }
      : null;
  }
  return slot === "object" ? { kind: "literal", value: text } : null;
}

export function tripleValid(triple: TripleDraft): boolean {
  return (
    slotTerm(triple.subject, "subject") !== null &&
    slotTerm(triple.predicate, "predicate") !== null &&
    slotTerm(triple.object, "object") !== null
  );
}

/** The run button is enabled only when every query triple is valid. */
export function draftValid(triples: TripleDraft[]): boolean {
  return triples.length > 0 && triples.every(tripleValid);
}

function termText(term: SlotTerm): string {
  if (term.kind === "variable") return `?${term.value}`;
  if (term.kind === "uri") return `<${term.value}>`;
  const escaped = term.value.replace(/\\/g, "\\\\").replace(/"/g, '\\"');
  return `"${escaped}"` + (term.language ? `@${term.language}` : "");
}

/** The draft as SPARQL text; all variables are projected by default. */
export function serializeDraft(
  triples: TripleDraft[],
  modifiers: DraftModifiers,
): string {
  const head: string[] = ["SELECT"];
  if (modifiers.distinct) head.push("DISTINCT");
  if (modifiers.countVar.trim()) {
    head.push(`(COUNT(?${modifiers.countVar.trim().replace(/^\?/, "")}) AS ?count)`);
  } else {
    head.push("*");
  }
  const lines = [head.join(" ") + " WHERE {"];
  for (const triple of triples) {
    const s = slotTerm(triple.subject, "subject");
    const p = slotTerm(triple.predicate, "predicate");
    const o = slotTerm(triple.object, "object");
    if (!s || !p || !o) throw new Error("draft has invalid triples");
    lines.push(`  ${termText(s)} ${termText(p)} ${termText(o)} .`);
  }
  lines.push("}");
  if (modifiers.groupBy.trim()) {
    const vars = modifiers.groupBy.split(/[\s,]+/).filter(Boolean)
      .map((v) => `?${v.replace(/^\?/, "")}`);
    lines.push("GROUP BY " + vars.join(" "));
  }
  if (modifiers.orderBy.trim()) {
    const variable = modifiers.orderBy.trim().replace(/^\?/, "");
    lines.push(`ORDER BY ${modifiers.orderDir.toUpperCase()}(?${variable})`);
  }
  if (modifiers.limit.trim()) lines.push(`LIMIT ${parseInt(modifiers.limit, 10)}`);
  if (modifiers.offset.trim()) lines.push(`OFFSET ${parseInt(modifiers.offset, 10)}`);
  return lines.join("\n");
}
