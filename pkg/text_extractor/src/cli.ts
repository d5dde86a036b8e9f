#!/usr/bin/env node
/**
 * extract --in corpus.txt --out triples.jsonl [--top-fraction 0.33]
 *
 * Reads plain text, ranks keywords, extracts keyword-anchored triples and
 * writes them in the triple file format the modeling pipeline ingests.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { extractTriples, toTripleFile } from "./extract";
import { extractKeywords } from "./textrank";

function usage(message?: string): never {
  if (message) console.error(`error: ${message}`);
  console.error(
    "usage: text-extractor extract --in <corpus.txt> --out <triples.jsonl> [--top-fraction 0.33]",
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv[0] !== "extract") usage(`unknown command ${argv[0] ?? "(none)"}`);
  let values;
  try {
    values = parseArgs({
      args: argv.slice(1),
      options: {
        in: { type: "string" },
        out: { type: "string" },
        "top-fraction": { type: "string", default: "0.33" },
      },
    }).values;
  } catch (err) {
    usage((err as Error).message);
  }
  if (!values.in || !values.out) usage("--in and --out are required");
  const fraction = Number(values["top-fraction"]);
  if (!(fraction > 0 && fraction <= 1)) usage("--top-fraction must be in (0, 1]");

  const text = readFileSync(values.in, "utf-8");
  const keywords = extractKeywords(text, fraction);
  const records = extractTriples(text, keywords);
  writeFileSync(values.out, toTripleFile(records), "utf-8");
  console.log(`wrote ${records.length} triples to ${values.out} (${keywords.length} keywords)`);
  return 0;
}

if (require.main === module) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  }
}
