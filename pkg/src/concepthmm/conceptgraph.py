"""Distilling a fitted model into a conceptual knowledge graph.

A concept pair is kept only when the document is expected to spend at least
``theta`` steps expressing it (its summed pair posterior); entities belong
to a concept when their membership probability clears ``vartheta``.  The
result is exported either as Graphviz DOT for visualization or as a JSON
document that round-trips losslessly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .inference import Posteriors
from .model import ModelParams


@dataclass(frozen=True)
class ConceptRelation:
    """A kept inter-concept relation with its vector and relevance score."""

    l1: int
    l2: int
    vector: tuple
    score: float


@dataclass(frozen=True)
class ConceptualGraph:
    """Thresholded concept memberships plus the relevant concept relations.

    ``members[c]`` lists ``(entity_id, probability)`` in descending
    probability (ties by entity id); ids index ``entity_names``.
    """

    members: tuple  # per concept: tuple of (entity_id, prob)
    entity_names: tuple
    relations: tuple  # of ConceptRelation
    theta: float
    vartheta: float

    @property
    def k(self) -> int:
        return len(self.members)

    def member_sets(self, vartheta: float = None) -> list:
        """Concept extensions as sets of entity names.

        With ``vartheta`` given, members are re-filtered at that cutoff
        (only probabilities at or above the graph's own cutoff are stored,
        so the effective cutoff is the larger of the two).
        """
        cut = self.vartheta if vartheta is None else vartheta
        return [
            {self.entity_names[e] for e, prob in ms if prob >= cut}
            for ms in self.members
        ]


def relevance_scores(post: Posteriors) -> np.ndarray:
    """Expected number of steps spent on each ordered concept pair, (k, k).

    Summed over all ordered pairs this is exactly the document length,
    since every step expresses exactly one pair.
    """
    return post.gamma_pair.sum(axis=0)


def default_theta(T: int, k: int) -> float:
    """Half the uniform share of the total relevance mass."""
    return T / (2.0 * k * (k - 1))


def build_conceptual_graph(
    params: ModelParams,
    post: Posteriors,
    theta: float = None,
    vartheta: float = 0.05,
) -> ConceptualGraph:
    """Assemble the thresholded graph from a model and its posteriors."""
    T = post.gamma.shape[0]
    if theta is None:
        theta = default_theta(T, params.k)
    if not 0 < theta <= T:
        raise ValueError(f"theta must be in (0, {T}] for this document, got {theta}")
    if not 0 <= vartheta <= 1:
        raise ValueError(f"vartheta must be in [0, 1], got {vartheta}")
    scores = relevance_scores(post)
    members = []
    for c in range(params.k):
        row = params.q[c]
        kept = [(int(e), float(p)) for e, p in enumerate(row) if p >= vartheta and p > 0]
        kept.sort(key=lambda ep: (-ep[1], ep[0]))
        members.append(tuple(kept))
    relations = []
    for p, (l1, l2) in enumerate(params.pairs):
        s = float(scores[l1, l2])
        if s >= theta:
            relations.append(
                ConceptRelation(
                    l1=int(l1), l2=int(l2), vector=tuple(params.v[p].tolist()), score=s
                )
            )
    return ConceptualGraph(
        members=tuple(members),
        entity_names=tuple(params.entity_names),
        relations=tuple(relations),
        theta=float(theta),
        vartheta=float(vartheta),
    )


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(graph: ConceptualGraph, top_members: int = 8) -> str:
    """Graphviz rendering: one box per concept, one edge per kept relation.

    Each box lists the concept's strongest ``top_members`` entities in
    descending membership probability.
    """
    lines = ["digraph conceptualization {", "  node [shape=box];"]
    for c, ms in enumerate(graph.members):
        rows = [f"C{c}"] + [
            f"{graph.entity_names[e]} {prob:.4f}" for e, prob in ms[:top_members]
        ]
        label = _dot_escape("\n".join(rows)).replace("\n", "\\n")
        lines.append(f'  c{c} [label="{label}"];')
    for rel in graph.relations:
        vec = ", ".join(f"{x:.4g}" for x in rel.vector)
        lines.append(
            f'  c{rel.l1} -> c{rel.l2} [label="S={rel.score:.4f} v=[{vec}]"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_structured(graph: ConceptualGraph) -> dict:
    return {
        "concepts": [
            {
                "id": c,
                "members": [
                    {"entity": graph.entity_names[e], "prob": prob} for e, prob in ms
                ],
            }
            for c, ms in enumerate(graph.members)
        ],
        "relations": [
            {
                "from": rel.l1,
                "to": rel.l2,
                "vector": list(rel.vector),
                "score": rel.score,
            }
            for rel in graph.relations
        ],
        "theta": graph.theta,
        "vartheta": graph.vartheta,
    }


def export_graph(graph: ConceptualGraph, format: str = "structured") -> bytes:
    """Serialize the graph; ``format`` is ``"dot"`` or ``"structured"``.

    Structured output is canonical JSON (sorted keys, fixed indentation);
    exporting a parsed structured document again is byte-identical.
    """
    if format == "dot":
        return to_dot(graph).encode("utf-8")
    if format == "structured":
        return (
            json.dumps(to_structured(graph), indent=2, sort_keys=True) + "\n"
        ).encode("utf-8")
    raise ValueError(f"unknown format {format!r}, expected 'dot' or 'structured'")


def parse_structured(data) -> ConceptualGraph:
    """Rebuild a graph from structured export bytes (or a parsed dict).

    Entity ids are reassigned in order of first appearance in the file;
    names, probabilities, relations and thresholds are preserved exactly.
    """
    doc = json.loads(data) if isinstance(data, (bytes, str)) else data
    names: list = []
    ids: dict = {}

    def entity_id(name: str) -> int:
        if name not in ids:
            ids[name] = len(names)
            names.append(name)
        return ids[name]

    members = []
    for c, concept in enumerate(doc["concepts"]):
        if concept["id"] != c:
            raise ValueError(f"concept ids must be consecutive, got {concept['id']} at {c}")
        members.append(
            tuple((entity_id(m["entity"]), float(m["prob"])) for m in concept["members"])
        )
    relations = tuple(
        ConceptRelation(
            l1=int(r["from"]),
            l2=int(r["to"]),
            vector=tuple(float(x) for x in r["vector"]),
            score=float(r["score"]),
        )
        for r in doc["relations"]
    )
    return ConceptualGraph(
        members=tuple(members),
        entity_names=tuple(names),
        relations=relations,
        theta=float(doc["theta"]),
        vartheta=float(doc["vartheta"]),
    )


def load_graph(path) -> ConceptualGraph:
    with open(path, "rb") as fh:
        return parse_structured(fh.read())
