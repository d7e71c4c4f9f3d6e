/**
 * Parsing and validation for the simulator's exchange formats.
 *
 * Two inputs exist: campaign results (CSV or JSON array, one row per
 * operating point) and error profiles (a single JSON object).  The result
 * column set is frozen; any drift in the producer should fail loudly here
 * with the offending column named, not surface as NaN in a figure.
 */

import Papa from "papaparse";

export const RESULT_COLUMNS = [
  "decoder",
  "N",
  "K",
  "C",
  "P",
  "tmax",
  "ebn0_db",
  "frames",
  "frame_errors",
  "bit_errors",
  "fer",
  "ber",
  "avg_iterations",
  "avg_norm_complexity",
  "undetected_errors",
  "seed",
] as const;

export type ResultColumn = (typeof RESULT_COLUMNS)[number];

const STRING_COLUMNS: ReadonlySet<ResultColumn> = new Set(["decoder"]);
const INT_COLUMNS: ReadonlySet<ResultColumn> = new Set([
  "N",
  "K",
  "C",
  "P",
  "tmax",
  "frames",
  "frame_errors",
  "bit_errors",
  "undetected_errors",
  "seed",
]);

export interface ResultRow {
  decoder: string;
  N: number;
  K: number;
  C: number;
  P: number;
  tmax: number;
  ebn0_db: number;
  frames: number;
  frame_errors: number;
  bit_errors: number;
  fer: number;
  ber: number;
  avg_iterations: number;
  avg_norm_complexity: number;
  undetected_errors: number;
  seed: number;
}

export interface ProfileDoc {
  code_hash: string;
  ebn0_db: number;
  seed: number;
  frames: number;
  failures: number;
  /** tally of frames by error order; index 0 counts clean frames */
  order_tallies: number[];
  /** first-error position counts over single-error frames, length N */
  e1_histogram: number[];
}

export class SchemaError extends Error {}

function coerceField(column: ResultColumn, raw: unknown, rowIndex: number): string | number {
  if (STRING_COLUMNS.has(column)) {
    if (typeof raw !== "string" || raw.length === 0) {
      throw new SchemaError(`row ${rowIndex}: column "${column}" must be a non-empty string`);
    }
    return raw;
  }
  const value = typeof raw === "number" ? raw : Number(raw);
  if (typeof raw === "string" && raw.trim() === "") {
    throw new SchemaError(`row ${rowIndex}: column "${column}" is empty`);
  }
  if (!Number.isFinite(value)) {
    throw new SchemaError(`row ${rowIndex}: column "${column}" is not numeric (got ${JSON.stringify(raw)})`);
  }
  if (INT_COLUMNS.has(column) && !Number.isInteger(value)) {
    throw new SchemaError(`row ${rowIndex}: column "${column}" must be an integer (got ${value})`);
  }
  return value;
}

function rowFromRecord(record: Record<string, unknown>, rowIndex: number): ResultRow {
  const out: Record<string, string | number> = {};
  for (const column of RESULT_COLUMNS) {
    if (!(column in record)) {
      throw new SchemaError(`row ${rowIndex}: missing column "${column}"`);
    }
    out[column] = coerceField(column, record[column], rowIndex);
  }
  return out as unknown as ResultRow;
}

function parseResultsCsv(text: string): ResultRow[] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(`CSV parse error at row ${first.row ?? "?"}: ${first.message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new SchemaError("results file has no header row");
  }
  const header = rows[0]!;
  const shared = Math.min(header.length, RESULT_COLUMNS.length);
  for (let i = 0; i < shared; i++) {
    if (header[i] !== RESULT_COLUMNS[i]) {
      throw new SchemaError(
        `header column ${i}: expected "${RESULT_COLUMNS[i]}", got "${header[i]}"`,
      );
    }
  }
  if (header.length !== RESULT_COLUMNS.length) {
    throw new SchemaError(
      `header has ${header.length} columns, expected ${RESULT_COLUMNS.length}`,
    );
  }
  return rows.slice(1).map((fields, i) => {
    if (fields.length !== RESULT_COLUMNS.length) {
      throw new SchemaError(`row ${i}: has ${fields.length} fields, expected ${RESULT_COLUMNS.length}`);
    }
    const record: Record<string, unknown> = {};
    RESULT_COLUMNS.forEach((column, j) => {
      record[column] = fields[j];
    });
    return rowFromRecord(record, i);
  });
}

function parseResultsJson(text: string): ResultRow[] {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`results file is not valid JSON: ${(err as Error).message}`);
  }
  if (!Array.isArray(doc)) {
    throw new SchemaError("JSON results must be an array of row objects");
  }
  return doc.map((entry, i) => {
    if (typeof entry !== "object" || entry === null || Array.isArray(entry)) {
      throw new SchemaError(`row ${i}: expected an object`);
    }
    return rowFromRecord(entry as Record<string, unknown>, i);
  });
}

/**
 * Parse campaign results from CSV or JSON text.  The format is sniffed
 * from the first non-whitespace character so callers can pass either
 * file through unchanged.
 */
export function parseResults(text: string): ResultRow[] {
  const head = text.trimStart();
  if (head.startsWith("[")) {
    return parseResultsJson(text);
  }
  return parseResultsCsv(text);
}

function requireNumber(doc: Record<string, unknown>, field: string): number {
  const value = doc[field];
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new SchemaError(`profile field "${field}" must be a finite number`);
  }
  return value;
}

function requireCountArray(doc: Record<string, unknown>, field: string): number[] {
  const value = doc[field];
  if (!Array.isArray(value) || value.length === 0) {
    throw new SchemaError(`profile field "${field}" must be a non-empty array`);
  }
  return value.map((entry, i) => {
    if (typeof entry !== "number" || !Number.isInteger(entry) || entry < 0) {
      throw new SchemaError(`profile field "${field}"[${i}] must be a non-negative integer`);
    }
    return entry;
  });
}

export function parseProfile(text: string): ProfileDoc {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`profile is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new SchemaError("profile must be a JSON object");
  }
  const record = doc as Record<string, unknown>;
  if (typeof record.code_hash !== "string" || record.code_hash.length === 0) {
    throw new SchemaError(`profile field "code_hash" must be a non-empty string`);
  }
  const profile: ProfileDoc = {
    code_hash: record.code_hash,
    ebn0_db: requireNumber(record, "ebn0_db"),
    seed: requireNumber(record, "seed"),
    frames: requireNumber(record, "frames"),
    failures: requireNumber(record, "failures"),
    order_tallies: requireCountArray(record, "order_tallies"),
    e1_histogram: requireCountArray(record, "e1_histogram"),
  };
  const tallySum = profile.order_tallies.reduce((a, b) => a + b, 0);
  if (tallySum !== profile.frames) {
    throw new SchemaError(
      `profile field "order_tallies" sums to ${tallySum}, expected frames=${profile.frames}`,
    );
  }
  return profile;
}
