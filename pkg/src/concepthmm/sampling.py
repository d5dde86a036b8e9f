"""Forward sampling of documents, and exact context-chain probabilities.

Each generated sentence runs the three-step cycle: advance the context
chain, draw an ordered concept pair from the new context, then instantiate
the pair by drawing a subject entity, an object entity and a relation
vector centered on the pair's vector with isotropic Gaussian noise.

Sampling uses numpy's default PCG64 generator seeded explicitly, so a
given (model, length, seed) always yields the same document within this
implementation; other implementations should compare distributions, not
streams.
"""

from __future__ import annotations

import numpy as np

from .model import ModelParams, StateIndex
from .triples import Document


def sequence_probability(pi, trans, states) -> float:
    """Exact probability that the context chain visits ``states`` in order.

    The product of the initial probability of the first state and the
    transition probabilities along the sequence.
    """
    pi = np.asarray(pi, dtype=float)
    trans = np.asarray(trans, dtype=float)
    states = list(states)
    if not states:
        raise ValueError("state sequence must be nonempty")
    b = pi.shape[0]
    for s in states:
        if not 0 <= s < b:
            raise IndexError(f"context id {s} out of range for b={b}")
    prob = float(pi[states[0]])
    for a, c in zip(states, states[1:]):
        prob *= float(trans[a, c])
    return prob


def sample_document(params: ModelParams, T: int, seed: int):
    """Sample a length-``T`` document; returns ``(document, hidden_states)``.

    The hidden state sequence (context plus concept pair per step) is
    returned so callers can score the exact generating path.
    """
    if T < 1:
        raise ValueError(f"document length must be at least 1, got {T}")
    rng = np.random.default_rng(seed)
    pairs = params.pairs
    subjects = np.empty(T, dtype=np.intp)
    objects = np.empty(T, dtype=np.intp)
    relations = np.empty((T, params.d))
    states = []
    j = int(rng.choice(params.b, p=params.pi))
    for t in range(T):
        if t > 0:
            j = int(rng.choice(params.b, p=params.trans[j]))
        p = int(rng.choice(len(pairs), p=params.f[j]))
        l1, l2 = (int(x) for x in pairs[p])
        subjects[t] = rng.choice(params.n, p=params.q[l1])
        objects[t] = rng.choice(params.n, p=params.q[l2])
        relations[t] = params.v[p] + params.sigma * rng.standard_normal(params.d)
        states.append(StateIndex(j=j, l1=l1, l2=l2))
    doc = Document(
        subjects=subjects,
        relations=relations,
        objects=objects,
        entity_names=params.entity_names,
    )
    return doc, states
