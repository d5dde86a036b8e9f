"""Command line interface: fit, generate, export, eval.

All commands are file based and reproducible: the same flags, inputs and
seed always produce identical output bytes.  Exit codes: 0 success,
1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import conceptgraph, evaluation, learning, model, sampling, triples
from .inference import posteriors

log = logging.getLogger("concepthmm")


def _fit(args) -> int:
    doc = triples.parse_triples(args.input, d=args.d, label_seed=args.seed)
    config = learning.FitConfig(
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        restarts=args.restarts,
        seed=args.seed,
        smoothing_floor=args.smoothing_floor,
    )
    result = learning.fit(
        doc, b=args.b, k=args.k, d=doc.dim, sigma=args.sigma,
        config=config, n_jobs=args.threads,
    )
    model.save_model(result.params, args.out)
    report_path = args.report or args.out + ".report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(result.report_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info(
        "fit: %d restarts, best %d with log-likelihood %.6f (%d iterations)",
        config.restarts, result.chosen_restart,
        result.restart_logliks[result.chosen_restart], result.iterations_used,
    )
    print(f"wrote {args.out} and {report_path}")
    return 0


def _generate(args) -> int:
    params = model.load_model(args.model)
    doc, states = sampling.sample_document(params, args.T, args.seed)
    triples.write_triples(doc, args.out)
    if args.with_states:
        with open(args.out + ".states.jsonl", "w", encoding="utf-8") as fh:
            for s in states:
                fh.write(json.dumps({"j": s.j, "l1": s.l1, "l2": s.l2}) + "\n")
    print(f"wrote {args.T} triples to {args.out}")
    return 0


def _export(args) -> int:
    params = model.load_model(args.model)
    doc = triples.parse_triples(args.input, d=params.d, label_seed=args.seed)
    post = posteriors(params, doc)
    graph = conceptgraph.build_conceptual_graph(
        params, post, theta=args.theta, vartheta=args.vartheta
    )
    wrote = []
    if args.format in ("both", "dot"):
        path = args.out + ".dot"
        with open(path, "wb") as fh:
            fh.write(conceptgraph.export_graph(graph, "dot"))
        wrote.append(path)
    if args.format in ("both", "structured"):
        path = args.out + ".json"
        with open(path, "wb") as fh:
            fh.write(conceptgraph.export_graph(graph, "structured"))
        wrote.append(path)
    print("wrote " + " and ".join(wrote))
    return 0


def _eval(args) -> int:
    graph = conceptgraph.load_graph(args.graph)
    known = None
    if args.input:
        known = triples.parse_triples(args.input).entity_names
    silver = evaluation.load_silver(args.silver, known_entities=known)
    report = evaluation.evaluate(graph, silver)
    if args.out:
        evaluation.write_report(report, args.out)
    print(f"case1 f1: {report.case1[2]:.6f}")
    if report.case2 is not None:
        print(f"case2 f1: {report.case2[2]:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concepthmm",
        description="Learn and score conceptual knowledge graphs from triple sequences.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit model parameters to a triple file", parents=[common])
    p.add_argument("--input", required=True, help="triple file (JSON lines)")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--report", default=None, help="fit report path (default: <out>.report.json)")
    p.add_argument("--b", type=int, required=True, help="number of contexts")
    p.add_argument("--k", type=int, required=True, help="number of concepts")
    p.add_argument("--d", type=int, default=None, help="vector dimension for label-only files")
    p.add_argument("--sigma", type=float, required=True, help="relation noise scale")
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--smoothing-floor", type=float, default=1e-9)
    p.add_argument("--threads", type=int, default=1, help="parallel restart workers")
    p.set_defaults(func=_fit)

    p = sub.add_parser("generate", help="sample a triple file from a model", parents=[common])
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--T", type=int, required=True, help="number of triples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-states", action="store_true", help="also write <out>.states.jsonl")
    p.set_defaults(func=_generate)

    p = sub.add_parser("export", help="build and write the conceptual graph", parents=[common])
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="triple file the posteriors are computed on")
    p.add_argument("--out", required=True, help="output base path (suffixes .dot/.json added)")
    p.add_argument("--theta", type=float, default=None, help="relevance cutoff (default T/(2 k (k-1)))")
    p.add_argument("--vartheta", type=float, default=0.05, help="membership cutoff")
    p.add_argument("--seed", type=int, default=0, help="label vectorization seed")
    p.add_argument("--format", choices=("both", "dot", "structured"), default="both")
    p.set_defaults(func=_export)

    p = sub.add_parser("eval", help="score a conceptual graph against a silver standard", parents=[common])
    p.add_argument("--graph", required=True, help="structured conceptual graph file")
    p.add_argument("--silver", required=True, help="silver standard file")
    p.add_argument("--input", default=None, help="triple file for entity-name resolution")
    p.add_argument("--out", default=None, help="report file to write")
    p.set_defaults(func=_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
