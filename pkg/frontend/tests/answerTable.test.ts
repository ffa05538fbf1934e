import { describe, expect, it } from "vitest";

import { emptyView, visibleColumns, visibleRows } from "../src/answerTable.js";
import type { ApiResult, Cell } from "../src/types.js";

function uriCell(value: string): Cell {
  return { type: "uri", value: `http://x/${value}`, display: value };
}

function litCell(value: string): Cell {
  return { type: "literal", value, display: value };
}

const RESULT: ApiResult = {
  columns: ["person", "age"],
  rows: [
    { person: uriCell("John_Kennedy"), age: litCell("43") },
    { person: uriCell("Rose_Kennedy"), age: litCell("104") },
    { person: uriCell("Ted_Kennedy"), age: litCell("77") },
  ],
  truncated: false,
};

describe("answer view transforms", () => {
  it("keyword filter is case-insensitive over visible cells", () => {
    const view = { ...emptyView(), filter: "john" };
    const rows = visibleRows(RESULT, view);
    expect(rows).toHaveLength(1);
    expect(rows[0].person.display).toBe("John_Kennedy");
  });

  it("filter ignores hidden columns", () => {
    const view = { ...emptyView(), filter: "john" };
    view.hidden.add("person");
    expect(visibleRows(RESULT, view)).toHaveLength(0);
  });

  it("numeric-aware sort", () => {
    const view = { ...emptyView(), sortKey: "age", sortDir: 1 as const };
    const ages = visibleRows(RESULT, view).map((r) => r.age.display);
    expect(ages).toEqual(["43", "77", "104"]);
    view.sortDir = -1;
    expect(visibleRows(RESULT, view).map((r) => r.age.display))
      .toEqual(["104", "77", "43"]);
  });

  it("string sort by column", () => {
    const view = { ...emptyView(), sortKey: "person", sortDir: 1 as const };
    const names = visibleRows(RESULT, view).map((r) => r.person.display);
    expect(names).toEqual(["John_Kennedy", "Rose_Kennedy", "Ted_Kennedy"]);
  });

  it("hidden columns drop out of the column list", () => {
    const view = emptyView();
    view.hidden.add("age");
    expect(visibleColumns(RESULT, view)).toEqual(["person"]);
  });

  it("transforms never mutate the cached result", () => {
    const view = { ...emptyView(), filter: "ted", sortKey: "age",
                   sortDir: -1 as const };
    visibleRows(RESULT, view);
    expect(RESULT.rows.map((r) => r.person.display))
      .toEqual(["John_Kennedy", "Rose_Kennedy", "Ted_Kennedy"]);
  });
});
