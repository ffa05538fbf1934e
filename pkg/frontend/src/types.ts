export type Slot = "subject" | "predicate" | "object";

export interface Suggestion {
  display: string;
  kind: "predicate" | "literal";
  canonical: string;
  language?: string;
}

export interface CompletionPhase {
  phase: "tree" | "bins";
  suggestions: Suggestion[];
}

export interface Cell {
  type: "uri" | "literal";
  value: string;
  display: string;
  "xml:lang"?: string;
  datatype?: string;
}

export type Row = Record<string, Cell>;

export interface ApiResult {
  columns: string[];
  rows: Row[];
  truncated: boolean;
}

export interface QuerySuggestion {
  index: number;
  kind: "term" | "structure";
  message: string;
  answerCount: number;
  query: string;
}

export interface RegisterRequest {
  url?: string;
  localFile?: string;
  fixture?: string;
  id?: string;
  config?: Record<string, unknown>;
}

export interface RegisterResponse {
  endpointId: string;
  initStats: {
    queriesIssued: number;
    queriesTimedOut: number;
    literalCount: number;
    predicateCount: number;
  };
}

export interface CompleteRequest {
  endpointId: string;
  slot: Slot;
  text: string;
  k?: number;
}

export interface ExecuteRequest {
  endpointId: string;
  query: string;
  sessionId?: string;
}

export interface ExecuteResponse {
  sessionId: string;
  epoch: number;
  result: ApiResult;
  suggestions: QuerySuggestion[];
}

export interface AcceptRequest {
  sessionId: string;
  epoch: number;
  suggestionIndex: number;
}

export interface AcceptResponse {
  sessionId: string;
  query: string;
  result: ApiResult;
}
