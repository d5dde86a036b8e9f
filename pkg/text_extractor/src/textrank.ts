/**
 * Graph-based keyword ranking over word co-occurrences.
 *
 * Candidate words (nouns and adjectives) become nodes; two candidates are
 * linked when they appear within a fixed-size window of each other inside a
 * sentence.  Node scores follow the classic damped random-surfer iteration
 * on the undirected co-occurrence graph.  Everything is deterministic:
 * nodes iterate in sorted order and ties rank alphabetically.
 */

import { isAdjective, isNounLike, splitSentences, tagSentence } from "./tokenize";

export interface RankedKeyword {
  word: string;
  score: number;
}

export interface TextrankOptions {
  damping?: number;
  windowSize?: number;
  maxIterations?: number;
  tolerance?: number;
}

const DEFAULTS = {
  damping: 0.85,
  windowSize: 4,
  maxIterations: 100,
  tolerance: 1e-6,
};

function candidateSequences(text: string): string[][] {
  return splitSentences(text).map((sentence) =>
    tagSentence(sentence)
      .filter((t) => isNounLike(t.pos) || isAdjective(t.pos))
      .map((t) => t.normal),
  );
}

export function rankWords(text: string, options: TextrankOptions = {}): RankedKeyword[] {
  const { damping, windowSize, maxIterations, tolerance } = { ...DEFAULTS, ...options };
  if (text.trim().length === 0) {
    throw new Error("text must be nonempty");
  }
  const weights = new Map<string, Map<string, number>>();
  const link = (a: string, b: string) => {
    if (!weights.has(a)) weights.set(a, new Map());
    const row = weights.get(a)!;
    row.set(b, (row.get(b) ?? 0) + 1);
  };
  for (const words of candidateSequences(text)) {
    for (const w of words) {
      if (!weights.has(w)) weights.set(w, new Map());
    }
    for (let i = 0; i < words.length; i++) {
      for (let j = i + 1; j < Math.min(words.length, i + windowSize); j++) {
        if (words[i] !== words[j]) {
          link(words[i], words[j]);
          link(words[j], words[i]);
        }
      }
    }
  }
  if (weights.size === 0) {
    throw new Error("text contains no candidate keywords");
  }

  const nodes = [...weights.keys()].sort();
  const outSum = new Map<string, number>();
  for (const node of nodes) {
    let total = 0;
    for (const w of weights.get(node)!.values()) total += w;
    outSum.set(node, total);
  }
  const score = new Map<string, number>(nodes.map((n) => [n, 1.0]));
  for (let iteration = 0; iteration < maxIterations; iteration++) {
    let maxDelta = 0;
    for (const node of nodes) {
      let incoming = 0;
      for (const [neighbor, w] of weights.get(node)!) {
        incoming += (w / outSum.get(neighbor)!) * score.get(neighbor)!;
      }
      const updated = 1 - damping + damping * incoming;
      maxDelta = Math.max(maxDelta, Math.abs(updated - score.get(node)!));
      score.set(node, updated);
    }
    if (maxDelta < tolerance) break;
  }
  return nodes
    .map((word) => ({ word, score: score.get(word)! }))
    .sort((a, b) => b.score - a.score || (a.word < b.word ? -1 : 1));
}

/** Top-ranked keywords; `topFraction` of the candidate vocabulary is kept. */
export function extractKeywords(text: string, topFraction = 1 / 3): string[] {
  if (!(topFraction > 0 && topFraction <= 1)) {
    throw new Error(`topFraction must be in (0, 1], got ${topFraction}`);
  }
  const ranked = rankWords(text);
  const keep = Math.max(1, Math.ceil(ranked.length * topFraction));
  return ranked.slice(0, keep).map((r) => r.word);
}
