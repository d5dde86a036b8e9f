"""Scoring a computed conceptualization against a reference one.

Concept closeness is the F1 of the two entity sets.  Case I compares
concept lists only: precision averages, over computed concepts, the best
closeness to any reference concept; recall swaps the roles; the headline
number is their harmonic mean.  Case II additionally matches relations,
where a relation pair scores the harmonic mean of both endpoint closenesses
and ``exp(-distance)`` of the two relation vectors.

Conventions for degenerate inputs: an F1 with zero precision and recall is
0, and a harmonic mean with any zero argument is 0 (the continuous limit).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .conceptgraph import ConceptualGraph


@dataclass(frozen=True)
class SilverStandard:
    """Reference conceptualization: entity-name sets, optionally relations.

    ``relations`` entries are ``(from_concept, to_concept, vector)`` with
    indices into ``concepts``.
    """

    concepts: tuple  # of frozenset of entity names
    relations: tuple = None  # of (int, int, tuple) or None

    def __post_init__(self):
        concepts = tuple(frozenset(c) for c in self.concepts)
        if not concepts:
            raise ValueError("silver standard needs at least one concept")
        if any(not c for c in concepts):
            raise ValueError("silver standard concepts must be nonempty")
        relations = self.relations
        if relations is not None:
            relations = tuple(
                (int(i), int(j), tuple(float(x) for x in vec))
                for i, j, vec in relations
            )
            for i, j, _ in relations:
                if not (0 <= i < len(concepts) and 0 <= j < len(concepts)):
                    raise ValueError(f"relation endpoint ({i}, {j}) out of range")
        object.__setattr__(self, "concepts", concepts)
        object.__setattr__(self, "relations", relations)


@dataclass(frozen=True, eq=False)
class EvalReport:
    case1: tuple  # (precision, recall, f1)
    case2: tuple  # (precision, recall, f1) or None
    closeness: np.ndarray  # (k_computed, k_reference)

    def to_dict(self) -> dict:
        out = {
            "case1": dict(zip(("precision", "recall", "f1"), map(float, self.case1))),
            "case2": None,
            "closeness": self.closeness.tolist(),
        }
        if self.case2 is not None:
            out["case2"] = dict(
                zip(("precision", "recall", "f1"), map(float, self.case2))
            )
        return out


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2.0 * p * r / (p + r)


def harmonic_mean(*xs) -> float:
    """Harmonic mean with the zero-annihilation convention."""
    if any(x == 0 for x in xs):
        return 0.0
    return len(xs) / sum(1.0 / x for x in xs)


def concept_prf(a, s) -> tuple:
    """Precision, recall and F1 of entity set ``a`` against reference ``s``.

    The F1 component is the closeness between the two concepts; it is
    symmetric in its arguments.
    """
    a, s = set(a), set(s)
    hits = len(a & s)
    p = hits / len(a) if a else 0.0
    r = hits / len(s) if s else 0.0
    return p, r, _f1(p, r)


def closeness(a, s) -> float:
    return concept_prf(a, s)[2]


def closeness_matrix(computed, reference) -> np.ndarray:
    m = np.array([[closeness(a, s) for s in reference] for a in computed])
    return m.reshape(len(computed), len(reference))


def case1_scores(computed, reference) -> tuple:
    """Concept-only precision, recall and F1 between two conceptualizations.

    Order of concepts in either list is irrelevant: every concept is
    matched against its best counterpart.
    """
    if not computed or not reference:
        raise ValueError("both conceptualizations must have at least one concept")
    m = closeness_matrix(computed, reference)
    p = float(m.max(axis=1).mean())
    r = float(m.max(axis=0).mean())
    return p, r, _f1(p, r)


def relation_closeness(ca_i, ca_j, vec_a, cs_i, cs_j, vec_s) -> float:
    """Closeness of two relations: harmonic mean of both endpoint concept
    closenesses and the exponentially decayed Euclidean vector distance."""
    vec_a = np.asarray(vec_a, dtype=float)
    vec_s = np.asarray(vec_s, dtype=float)
    if vec_a.shape != vec_s.shape:
        raise ValueError(
            f"relation vectors have different dimensions {vec_a.shape} vs {vec_s.shape}"
        )
    dist = float(np.linalg.norm(vec_a - vec_s))
    return harmonic_mean(closeness(ca_i, cs_i), closeness(ca_j, cs_j), np.exp(-dist))


def case2_scores(graph: ConceptualGraph, silver: SilverStandard, vartheta: float = None) -> tuple:
    """Relation-aware precision, recall and F1.

    The graph's concepts are materialized as name sets at ``vartheta``
    (default: the cutoff the graph was built with).  Sides without any
    relation contribute zero rather than failing, so the score stays total.
    """
    if silver.relations is None:
        raise ValueError("silver standard has no relations; only Case I applies")
    sets_a = graph.member_sets(vartheta)
    sets_s = [set(c) for c in silver.concepts]
    rels_a = [(sets_a[r.l1], sets_a[r.l2], r.vector) for r in graph.relations]
    rels_s = [(sets_s[i], sets_s[j], vec) for i, j, vec in silver.relations]
    g = np.zeros((len(rels_a), len(rels_s)))
    for x, (ai, aj, va) in enumerate(rels_a):
        for y, (si, sj, vs) in enumerate(rels_s):
            g[x, y] = relation_closeness(ai, aj, va, si, sj, vs)
    p = float(g.max(axis=1).mean()) if len(rels_a) else 0.0
    r = float(g.max(axis=0).mean()) if len(rels_s) else 0.0
    return p, r, _f1(p, r)


def evaluate(graph: ConceptualGraph, silver: SilverStandard, vartheta: float = None) -> EvalReport:
    """Score a graph against a silver standard; Case II only when the
    silver standard carries relations."""
    sets_a = graph.member_sets(vartheta)
    sets_s = [set(c) for c in silver.concepts]
    case1 = case1_scores(sets_a, sets_s)
    case2 = None
    if silver.relations is not None and len(silver.relations) > 0:
        case2 = case2_scores(graph, silver, vartheta)
    return EvalReport(
        case1=case1, case2=case2, closeness=closeness_matrix(sets_a, sets_s)
    )


# ---------------------------------------------------------------------------
# silver standard file


def parse_silver(data, known_entities=None) -> SilverStandard:
    """Parse a silver standard file.

    Layout: ``{"concepts": [[name, ...], ...], "relations": [{"from_index":
    i, "to_index": j, "vector": [...]}, ...]}`` with ``relations`` optional.
    When ``known_entities`` is given, every concept member must resolve
    against it; unresolved names are reported together.
    """
    doc = json.loads(data) if isinstance(data, (bytes, str)) else data
    concepts = [tuple(c) for c in doc.get("concepts", [])]
    if known_entities is not None:
        known = set(known_entities)
        missing = sorted({name for c in concepts for name in c if name not in known})
        if missing:
            raise ValueError(
                "silver standard names not in the entity dictionary: "
                + ", ".join(missing)
            )
    relations = None
    if doc.get("relations") is not None:
        relations = tuple(
            (r["from_index"], r["to_index"], tuple(r["vector"]))
            for r in doc["relations"]
        )
    return SilverStandard(concepts=tuple(concepts), relations=relations)


def load_silver(path, known_entities=None) -> SilverStandard:
    with open(path, "rb") as fh:
        return parse_silver(fh.read(), known_entities)


def write_report(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
