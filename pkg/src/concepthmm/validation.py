"""Input coercion and checking helpers for the estimator-facing API."""

from __future__ import annotations

import numpy as np

from .model import ModelParams
from .triples import Document


def as_document(X, d: int = None) -> Document:
    """Coerce estimator input into a :class:`Document`.

    Accepts a ``Document``, a (T, d + 2) array whose first and last columns
    are integer entity ids with the relation vector in between, or an
    iterable of ``(subject_id, vector, object_id)`` triples.
    """
    if isinstance(X, Document):
        return X
    if isinstance(X, np.ndarray):
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[1] < 3:
            raise ValueError(
                f"array input must be (T, d + 2) with ids in the outer columns, got {X.shape}"
            )
        subjects, relations, objects = X[:, 0], X[:, 1:-1], X[:, -1]
        for name, col in (("subject", subjects), ("object", objects)):
            if not np.all(col == np.floor(col)):
                raise ValueError(f"{name} column must hold integer entity ids")
        if d is not None and relations.shape[1] != d:
            raise ValueError(f"expected {d}-dim relation vectors, got {relations.shape[1]}")
        return Document(
            subjects=subjects.astype(np.intp),
            relations=relations.astype(float),
            objects=objects.astype(np.intp),
        )
    triples = list(X)
    if not triples:
        raise ValueError("input must contain at least one triple")
    subjects = [t[0] for t in triples]
    relations = [np.atleast_1d(np.asarray(t[1], dtype=float)) for t in triples]
    objects = [t[2] for t in triples]
    return Document(
        subjects=np.asarray(subjects, dtype=np.intp),
        relations=np.vstack(relations),
        objects=np.asarray(objects, dtype=np.intp),
    )


def check_document_matches(doc: Document, params: ModelParams) -> Document:
    """Raise when a document cannot be scored under the given parameters."""
    if doc.dim != params.d:
        raise ValueError(
            f"document has {doc.dim}-dim relation vectors, model expects {params.d}"
        )
    if int(max(doc.subjects.max(), doc.objects.max())) >= params.n:
        raise ValueError(
            f"document references entity ids beyond the model's {params.n} entities"
        )
    return doc
