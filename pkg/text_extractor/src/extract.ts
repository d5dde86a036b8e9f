/**
 * Keyword-anchored triple extraction.
 *
 * Within one sentence, maximal runs of adjectives and nouns form noun
 * phrases.  Two consecutive noun phrases that both contain a keyword become
 * a subject/object pair when the tokens between them look like a verb or
 * preposition bridge (e.g. "for", "to ensure", "is replicated across"); the
 * bridge's core words become the relation label.  Sentence order, and the
 * order of pairs inside a sentence, are preserved: downstream modeling is
 * order-sensitive.
 */

import {
  Token,
  isAdjective,
  isConnectiveCore,
  isConnectivePart,
  isNounLike,
  splitSentences,
  tagSentence,
} from "./tokenize";

export interface TripleRecord {
  s: string;
  r_label: string;
  o: string;
}

export interface ExtractOptions {
  /** longest token gap allowed between the two noun phrases */
  maxGap?: number;
}

interface Phrase {
  text: string;
  normals: string[];
  start: number;
  end: number; // exclusive
}

function nounPhrases(tokens: Token[]): Phrase[] {
  const phrases: Phrase[] = [];
  let run: Token[] = [];
  let start = 0;
  const flush = (end: number) => {
    // a run must contain a noun; drop leading adjectives-only runs
    if (run.some((t) => isNounLike(t.pos))) {
      phrases.push({
        text: run.map((t) => t.normal).join(" "),
        normals: run.map((t) => t.normal),
        start,
        end,
      });
    }
    run = [];
  };
  tokens.forEach((token, i) => {
    if (isNounLike(token.pos) || isAdjective(token.pos)) {
      if (run.length === 0) start = i;
      run.push(token);
    } else {
      flush(i);
    }
  });
  flush(tokens.length);
  return phrases;
}

function connectiveLabel(tokens: Token[], from: number, to: number): string | null {
  const between = tokens.slice(from, to);
  if (between.length === 0) return null;
  if (!between.every((t) => isConnectivePart(t.pos))) return null;
  const core = between.filter((t) => isConnectiveCore(t.pos) || t.pos === "RB" || t.pos === "RP");
  if (core.length === 0 || !between.some((t) => isConnectiveCore(t.pos))) return null;
  return core.map((t) => t.normal).join(" ");
}

export function extractTriplesFromSentence(
  sentence: string,
  keywords: Set<string>,
  options: ExtractOptions = {},
): TripleRecord[] {
  const maxGap = options.maxGap ?? 4;
  const tokens = tagSentence(sentence);
  const phrases = nounPhrases(tokens).filter((p) =>
    p.normals.some((w) => keywords.has(w)),
  );
  const records: TripleRecord[] = [];
  for (let i = 0; i + 1 < phrases.length; i++) {
    const left = phrases[i];
    const right = phrases[i + 1];
    if (right.start - left.end > maxGap) continue;
    const label = connectiveLabel(tokens, left.end, right.start);
    if (label === null) continue;
    records.push({ s: left.text, r_label: label, o: right.text });
  }
  return records;
}

export function extractTriples(
  text: string,
  keywords: Iterable<string>,
  options: ExtractOptions = {},
): TripleRecord[] {
  const keywordSet = new Set(keywords);
  const records: TripleRecord[] = [];
  for (const sentence of splitSentences(text)) {
    records.push(...extractTriplesFromSentence(sentence, keywordSet, options));
  }
  return records;
}

export function toTripleFile(records: TripleRecord[]): string {
  return records
    .map((r) => JSON.stringify({ s: r.s, r_label: r.r_label, o: r.o }))
    .join("\n") + (records.length > 0 ? "\n" : "");
}
