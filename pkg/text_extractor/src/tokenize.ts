/**
 * Sentence splitting and POS tagging.
 *
 * Splitting is a deterministic regex pass: sentence ends at `.`, `!` or `?`
 * followed by whitespace and an upper-case letter, a digit or end of text.
 * Tagging uses wink-pos-tagger's lexicon-plus-rules Penn tagger.
 */

import winkPosTagger from "wink-pos-tagger";

export interface Token {
  /** surface form as written */
  value: string;
  /** lowercased normal form used for matching */
  normal: string;
  /** Penn treebank tag */
  pos: string;
}

const tagger = winkPosTagger();

export function splitSentences(text: string): string[] {
  const pieces = text
    .replace(/\s+/g, " ")
    .split(/(?<=[.!?])\s+(?=[A-Z0-9"'(])/);
  return pieces.map((s) => s.trim()).filter((s) => s.length > 0);
}

export function tagSentence(sentence: string): Token[] {
  return tagger
    .tagSentence(sentence)
    .filter((t: { tag: string }) => t.tag === "word")
    .map((t: { value: string; normal?: string; pos: string }) => ({
      value: t.value,
      normal: (t.normal ?? t.value).toLowerCase(),
      pos: t.pos,
    }));
}

export function isNounLike(pos: string): boolean {
  return pos.startsWith("NN");
}

export function isAdjective(pos: string): boolean {
  return pos.startsWith("JJ");
}

/** tags that may sit inside the connective between two noun phrases */
export function isConnectivePart(pos: string): boolean {
  return (
    pos.startsWith("VB") ||
    pos === "IN" ||
    pos === "TO" ||
    pos === "DT" ||
    pos === "RB" ||
    pos === "MD" ||
    pos === "RP"
  );
}

/** tags that carry the meaning of a connective */
export function isConnectiveCore(pos: string): boolean {
  return pos.startsWith("VB") || pos === "IN" || pos === "TO";
}
