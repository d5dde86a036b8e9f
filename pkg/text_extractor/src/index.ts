export { extractKeywords, rankWords } from "./textrank";
export {
  extractTriples,
  extractTriplesFromSentence,
  toTripleFile,
  TripleRecord,
} from "./extract";
export { splitSentences, tagSentence } from "./tokenize";
