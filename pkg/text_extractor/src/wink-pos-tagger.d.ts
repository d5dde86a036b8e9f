declare module "wink-pos-tagger" {
  interface WinkToken {
    value: string;
    tag: string; // word | punctuation | number | ...
    normal?: string;
    pos: string; // Penn treebank tag
    lemma?: string;
  }
  interface Tagger {
    tagSentence(sentence: string): WinkToken[];
    tagRawTokens(tokens: string[]): WinkToken[];
  }
  function winkPosTagger(): Tagger;
  export = winkPosTagger;
}
