/**
 * Text normalization, kept deliberately identical to the Python side:
 * lowercase, split on anything that is not a letter or digit, drop
 * stopwords, no stemming. Both components read the same stopword file,
 * so a record renders to the same one-line string in either language.
 */

import { readFileSync } from "node:fs";

import type { ThesisRecord } from "./records.js";

const ALNUM = /[\p{L}\p{N}]/u;

export class EmptyDocumentError extends Error {
  readonly recordId: string;

  constructor(recordId: string) {
    super(`record ${recordId}: title and keywords normalize to nothing`);
    this.name = "EmptyDocumentError";
    this.recordId = recordId;
  }
}

/** One record reduced to its token stream plus the one-line rendering. */
export interface DocumentText {
  recordId: string;
  tokens: string[];
  rendered: string;
}

/** Stopword set from a one-term-per-line UTF-8 file. Blank lines are ignored. */
export function loadStopwords(path: string): Set<string> {
  const text = readFileSync(path, "utf-8");
  const words = new Set<string>();
  for (const line of text.split(/\r?\n/)) {
    const word = line.trim().toLowerCase();
    if (word) words.add(word);
  }
  return words;
}

/** Lowercased tokens with punctuation stripped and stopwords removed. */
export function tokenize(text: string, stopwords: Set<string> = new Set()): string[] {
  const lowered = text.toLowerCase();
  const out: string[] = [];
  let word = "";
  for (const ch of lowered) {
    if (ALNUM.test(ch)) {
      word += ch;
    } else if (word) {
      out.push(word);
      word = "";
    }
  }
  if (word) out.push(word);
  return out.filter((tok) => !stopwords.has(tok));
}

/**
 * Fuse a record's title and keywords into one DocumentText.
 *
 * Token order is title first, then each keyword in record order. In the
 * rendering, each title token is its own comma-separated term while a
 * multi-word keyword stays intact as one term. A record whose segments
 * all normalize to nothing raises EmptyDocumentError.
 */
export function buildDocument(
  record: ThesisRecord,
  stopwords: Set<string> = new Set(),
): DocumentText {
  const segments: string[][] = [];
  for (const token of tokenize(record.title, stopwords)) {
    segments.push([token]);
  }
  for (const keyword of record.keywords) {
    const kwTokens = tokenize(keyword, stopwords);
    if (kwTokens.length > 0) segments.push(kwTokens);
  }
  if (segments.length === 0) {
    throw new EmptyDocumentError(record.id);
  }
  const tokens = segments.flat();
  const rendered = segments.map((seg) => seg.join(" ")).join(", ");
  return { recordId: record.id, tokens, rendered };
}
