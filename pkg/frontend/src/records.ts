/**
 * Readers for the shared on-disk formats: records as JSONL, the
 * college-to-departments mapping as a JSON object. These match the files
 * the Python CLI produces and consumes, byte for byte in semantics.
 */

import { readFileSync } from "node:fs";

import { mulberry32, shuffleInPlace } from "./rng.js";

export const MISSING = "missing";

export interface ThesisRecord {
  id: string;
  title: string;
  keywords: string[];
  department: string | null;
  college: string | null;
}

export interface CollegeMapping {
  /** College name -> owned department names, in file order. */
  entries: Map<string, string[]>;
  colleges: string[];
}

function asRecord(raw: unknown, path: string, line: number): ThesisRecord {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new Error(`${path}:${line}: record must be a JSON object`);
  }
  const obj = raw as Record<string, unknown>;
  if (typeof obj.id !== "string" || obj.id === "") {
    throw new Error(`${path}:${line}: missing or empty id`);
  }
  if (typeof obj.title !== "string" || obj.title === "") {
    throw new Error(`${path}:${line}: missing or empty title`);
  }
  const keywords: string[] = [];
  if (obj.keywords !== undefined) {
    if (!Array.isArray(obj.keywords)) {
      throw new Error(`${path}:${line}: keywords must be an array`);
    }
    for (const kw of obj.keywords) {
      if (typeof kw !== "string") {
        throw new Error(`${path}:${line}: keywords must be strings`);
      }
      keywords.push(kw);
    }
  }
  const department = typeof obj.department === "string" ? obj.department : null;
  const college = typeof obj.college === "string" ? obj.college : null;
  return { id: obj.id, title: obj.title, keywords, department, college };
}

/** Load records from a JSONL file. Duplicate ids and malformed rows are rejected. */
export function loadRecords(path: string): ThesisRecord[] {
  const text = readFileSync(path, "utf-8");
  const records: ThesisRecord[] = [];
  const seen = new Set<string>();
  let lineNo = 0;
  for (const line of text.split(/\r?\n/)) {
    lineNo += 1;
    if (!line.trim()) continue;
    let raw: unknown;
    try {
      raw = JSON.parse(line);
    } catch (err) {
      throw new Error(`${path}:${lineNo}: invalid JSON (${(err as Error).message})`);
    }
    const record = asRecord(raw, path, lineNo);
    if (seen.has(record.id)) {
      throw new Error(`${path}:${lineNo}: duplicate record id ${JSON.stringify(record.id)}`);
    }
    seen.add(record.id);
    records.push(record);
  }
  return records;
}

/** Load the college mapping from a JSON object file. */
export function loadMapping(path: string): CollegeMapping {
  const raw: unknown = JSON.parse(readFileSync(path, "utf-8"));
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new Error(`${path}: mapping file must be a JSON object`);
  }
  const entries = new Map<string, string[]>();
  for (const [college, depts] of Object.entries(raw as Record<string, unknown>)) {
    if (!college) throw new Error(`${path}: college names must be non-empty`);
    if (!Array.isArray(depts) || depts.length === 0 || depts.some((d) => typeof d !== "string")) {
      throw new Error(`${path}: college ${JSON.stringify(college)} needs a non-empty department list`);
    }
    entries.set(college, depts as string[]);
  }
  if (entries.size === 0) {
    throw new Error(`${path}: mapping has no colleges`);
  }
  return { entries, colleges: [...entries.keys()] };
}

/** Records carrying a real college label (not null, not the sentinel). */
export function labeledOnly(records: ThesisRecord[]): ThesisRecord[] {
  return records.filter((r) => r.college !== null && r.college !== MISSING);
}

/**
 * Stratified train/holdout split with an explicit seed. Each college's
 * records are shuffled and split at ceil(fraction * n), so every class
 * keeps at least one training record.
 */
export function stratifiedSplit(
  records: ThesisRecord[],
  trainFraction: number,
  seed: number,
): { train: ThesisRecord[]; holdout: ThesisRecord[] } {
  if (!(trainFraction > 0 && trainFraction < 1)) {
    throw new Error("trainFraction must be in (0, 1)");
  }
  const groups = new Map<string, ThesisRecord[]>();
  for (const rec of labeledOnly(records)) {
    const group = groups.get(rec.college as string);
    if (group) group.push(rec);
    else groups.set(rec.college as string, [rec]);
  }
  const rand = mulberry32(seed);
  const train: ThesisRecord[] = [];
  const holdout: ThesisRecord[] = [];
  for (const group of groups.values()) {
    shuffleInPlace(group, rand);
    const cut = Math.ceil(trainFraction * group.length);
    train.push(...group.slice(0, cut));
    holdout.push(...group.slice(cut));
  }
  return { train, holdout };
}
