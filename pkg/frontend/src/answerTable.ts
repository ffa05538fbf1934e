import type { ApiResult, Cell, Row } from "./types.js";

export interface AnswerView {
  hidden: Set<string>;
  sortKey: string | null;
  sortDir: 1 | -1;
  filter: string;
}

export function emptyView(): AnswerView {
  return { hidden: new Set(), sortKey: null, sortDir: 1, filter: "" };
}

export function visibleColumns(result: ApiResult, view: AnswerView): string[] {
  return result.columns.filter((c) => !view.hidden.has(c));
}

function cellText(cell: Cell | undefined): string {
  return cell?.display ?? "";
}

function sortValue(cell: Cell | undefined): [number, number | string] {
  const text = cellText(cell);
  const numeric = Number(text);
  return text !== "" && !Number.isNaN(numeric) ? [0, numeric] : [1, text];
}

/** Keyword filter and column sort as pure transforms of the cached rows. */
export function visibleRows(result: ApiResult, view: AnswerView): Row[] {
  let rows = result.rows;
  const needle = view.filter.trim().toLowerCase();
  if (needle) {
    const columns = visibleColumns(result, view);
    rows = rows.filter((row) =>
      columns.some((c) => cellText(row[c]).toLowerCase().includes(needle)),
    );
  }
  if (view.sortKey !== null) {
    const key = view.sortKey;
    rows = [...rows].sort((a, b) => {
      const [ta, va] = sortValue(a[key]);
      const [tb, vb] = sortValue(b[key]);
      if (ta !== tb) return (ta - tb) * view.sortDir;
      if (va < vb) return -view.sortDir;
      if (va > vb) return view.sortDir;
      return 0;
    });
  }
  return rows;
}

export interface AnswerTableCallbacks {
  onDragTerm?: (payload: { column: string; cell: Cell }) => void;
}

export const TERM_MIME = "application/x-scribe-term";

/** Renders the answer table plus its column toggles into `container`. */
export function renderAnswerTable(
  container: HTMLElement,
  result: ApiResult,
  view: AnswerView,
  rerender: () => void,
  callbacks: AnswerTableCallbacks = {},
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();

  const toggles = doc.createElement("div");
  toggles.className = "column-toggles";
  for (const column of result.columns) {
    const label = doc.createElement("label");
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.checked = !view.hidden.has(column);
    box.dataset.column = column;
    box.addEventListener("change", () => {
      if (box.checked) view.hidden.delete(column);
      else view.hidden.add(column);
      rerender();
    });
    label.append(box, doc.createTextNode(" " + column));
    toggles.appendChild(label);
  }
  container.appendChild(toggles);

  const table = doc.createElement("table");
  table.className = "answers";
  const head = doc.createElement("tr");
  for (const column of visibleColumns(result, view)) {
    const th = doc.createElement("th");
    th.textContent =
      column + (view.sortKey === column ? (view.sortDir > 0 ? " ▲" : " ▼") : "");
    th.addEventListener("click", () => {
      if (view.sortKey === column) {
        view.sortDir = view.sortDir > 0 ? -1 : 1;
      } else {
        view.sortKey = column;
        view.sortDir = 1;
      }
      rerender();
    });
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const row of visibleRows(result, view)) {
    const tr = doc.createElement("tr");
    for (const column of visibleColumns(result, view)) {
      const td = doc.createElement("td");
      const cell = row[column];
      td.textContent = cellText(cell);
      if (cell) {
        td.draggable = true;
        td.title = cell.value;
        td.addEventListener("dragstart", (event) => {
          event.dataTransfer?.setData(TERM_MIME, JSON.stringify(cell));
          callbacks.onDragTerm?.({ column, cell });
        });
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);

  if (result.truncated) {
    const note = doc.createElement("p");
    note.className = "truncated-note";
    note.textContent = "Some endpoints timed out; answers may be incomplete.";
    container.appendChild(note);
  }
}
