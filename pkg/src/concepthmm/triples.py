"""Triple files and in-memory documents.

A document is an ordered sequence of observations ``(subject entity,
relation vector, object entity)``.  On disk it is UTF-8 JSON lines, one
object per line::

    {"s": "databases", "r": [0.9, -0.1], "o": "cloud"}
    {"s": "databases", "r_label": "for", "o": "apps"}

Exactly one of ``r`` (an explicit vector) or ``r_label`` (a relation phrase,
vectorized deterministically on ingest) must be present.  Lines starting
with ``#`` and blank lines are ignored.  Entity ids are assigned in order of
first appearance, so prepending new triples never renumbers existing ones
retroactively within the unchanged prefix.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

#: dimension used for vectorized relation labels when none is requested
DEFAULT_LABEL_DIM = 4


class TripleParseError(ValueError):
    """Malformed triple file; message carries the 1-based line number."""


@dataclass(frozen=True, eq=False)
class Observation:
    """One entity-relation-entity step of a document."""

    subject: int
    relation: np.ndarray
    object: int


@dataclass(frozen=True, eq=False)
class Document:
    """A triple sequence with its entity dictionary.

    ``subjects`` and ``objects`` hold entity ids, ``relations`` is the
    (T, d) matrix of relation vectors, and ``entity_names[i]`` is the
    surface form of entity ``i``.
    """

    subjects: np.ndarray
    relations: np.ndarray
    objects: np.ndarray
    entity_names: tuple = field(default=None)

    def __post_init__(self):
        subjects = np.asarray(self.subjects, dtype=np.intp)
        objects = np.asarray(self.objects, dtype=np.intp)
        relations = np.asarray(self.relations, dtype=float)
        if relations.ndim != 2:
            raise ValueError(f"relations must be (T, d), got shape {relations.shape}")
        if not (len(subjects) == len(objects) == len(relations)):
            raise ValueError("subjects, relations and objects must have equal length")
        if len(subjects) < 1:
            raise ValueError("a document needs at least one observation")
        if not np.isfinite(relations).all():
            raise ValueError("relation vectors must be finite")
        for arr in (subjects, objects, relations):
            arr.setflags(write=False)
        names = self.entity_names
        if names is None:
            n = int(max(subjects.max(), objects.max())) + 1
            names = tuple(f"e{i}" for i in range(n))
        else:
            names = tuple(str(s) for s in names)
        if subjects.min() < 0 or objects.min() < 0:
            raise ValueError("entity ids must be nonnegative")
        if max(subjects.max(), objects.max()) >= len(names):
            raise ValueError("entity id out of range of the entity dictionary")
        object.__setattr__(self, "subjects", subjects)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "entity_names", names)

    def __len__(self) -> int:
        return len(self.subjects)

    @property
    def n_entities(self) -> int:
        return len(self.entity_names)

    @property
    def dim(self) -> int:
        return self.relations.shape[1]

    @property
    def observations(self) -> list:
        return [
            Observation(int(s), r, int(o))
            for s, r, o in zip(self.subjects, self.relations, self.objects)
        ]


def vectorize_relation(label: str, d: int, seed: int) -> np.ndarray:
    """Deterministic unit vector for a relation phrase.

    The label (together with the seed) keys a hash that seeds a PRNG; the
    vector is d standard-normal draws normalized to unit length.  Distinct
    labels therefore land in effectively independent directions on the
    sphere.  Python's builtin ``hash`` is avoided on purpose: results must
    not depend on ``PYTHONHASHSEED``.
    """
    if not label:
        raise ValueError("relation label must be nonempty")
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    digest = hashlib.blake2b(
        f"{seed}\x00{label}".encode("utf-8"), digest_size=16
    ).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    vec = rng.standard_normal(d)
    norm = np.linalg.norm(vec)
    while norm == 0.0:  # unreachable in practice, kept for totality
        vec = rng.standard_normal(d)
        norm = np.linalg.norm(vec)
    return vec / norm


def _iter_lines(source) -> Iterator[tuple]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            yield from enumerate(fh, start=1)
        return
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    yield from enumerate(source, start=1)


def parse_triples(source, d: int = None, label_seed: int = 0) -> Document:
    """Parse a triple file into a :class:`Document`.

    ``source`` may be a path, raw bytes, or a binary file object.  ``d``
    fixes the vector dimension for label-only records (default
    ``DEFAULT_LABEL_DIM``); when explicit vectors are present their
    dimension wins and all records must agree with it.
    """
    ids: dict = {}
    names: list = []
    subjects: list = []
    objects: list = []
    vectors: list = []  # explicit np arrays, or (label,) placeholders
    explicit_dim = None

    def entity_id(name) -> int:
        if not isinstance(name, str) or not name:
            raise ValueError("entity name must be a nonempty string")
        if name not in ids:
            ids[name] = len(names)
            names.append(name)
        return ids[name]

    for lineno, raw in _iter_lines(source):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rec = json.loads(line)
            if not isinstance(rec, dict):
                raise ValueError("record is not an object")
            has_r = "r" in rec
            has_label = "r_label" in rec
            if has_r == has_label:
                raise ValueError("need exactly one of 'r' or 'r_label'")
            subjects.append(entity_id(rec["s"]))
            objects.append(entity_id(rec["o"]))
            if has_r:
                vec = np.asarray(rec["r"], dtype=float)
                if vec.ndim != 1 or vec.size == 0:
                    raise ValueError("'r' must be a nonempty flat list of numbers")
                if explicit_dim is None:
                    explicit_dim = vec.size
                elif vec.size != explicit_dim:
                    raise ValueError(
                        f"vector dimension {vec.size} does not match earlier dimension {explicit_dim}"
                    )
                vectors.append(vec)
            else:
                label = rec["r_label"]
                if not isinstance(label, str) or not label:
                    raise ValueError("'r_label' must be a nonempty string")
                vectors.append((label,))
        except (ValueError, KeyError, TypeError) as exc:
            raise TripleParseError(f"line {lineno}: {exc}") from exc

    if not subjects:
        raise TripleParseError("empty triple file")
    dim = explicit_dim if explicit_dim is not None else (d or DEFAULT_LABEL_DIM)
    if d is not None and explicit_dim is not None and d != explicit_dim:
        raise TripleParseError(
            f"requested dimension {d} but file has explicit {explicit_dim}-dim vectors"
        )
    relations = np.empty((len(vectors), dim))
    for t, vec in enumerate(vectors):
        if isinstance(vec, tuple):
            relations[t] = vectorize_relation(vec[0], dim, label_seed)
        else:
            relations[t] = vec
    return Document(
        subjects=np.array(subjects, dtype=np.intp),
        relations=relations,
        objects=np.array(objects, dtype=np.intp),
        entity_names=tuple(names),
    )


def triple_lines(doc: Document) -> Iterator[str]:
    names = doc.entity_names
    for s, r, o in zip(doc.subjects, doc.relations, doc.objects):
        yield json.dumps({"s": names[s], "r": r.tolist(), "o": names[o]})


def write_triples(doc: Document, path) -> None:
    """Write a document in the triple file format (explicit vectors)."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in triple_lines(doc):
            fh.write(line + "\n")


def serialize_triples(doc: Document) -> bytes:
    return ("\n".join(triple_lines(doc)) + "\n").encode("utf-8")
