"""Parameter set of the concept-level document model and its composite-state HMM view.

The generative story couples three layers:

* a first-order Markov chain over ``b`` latent writing contexts
  (initial distribution ``pi``, transition matrix ``trans``),
* per context, a distribution ``f`` over ordered pairs of distinct
  concepts out of ``k`` concepts,
* per concept, a membership distribution ``q`` over ``n`` entities, and a
  d-dimensional vector ``v`` per concept pair from which the observed
  relation vector is drawn with isotropic Gaussian noise of scale ``sigma``.

The whole model is equivalent to a single HMM whose composite states are
triples ``(j, l1, l2)`` of a context and an ordered concept pair, giving
``b * k * (k - 1)`` states.  Self-pairs ``(l, l)`` do not exist: ``f`` and
``v`` are stored packed over the ordered-pair index, so no diagonal entry can
carry probability mass by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MODEL_FORMAT_VERSION = "concept-hmm/1"

#: tolerance for "rows sum to one" checks on stored distributions
PROB_TOL = 1e-10


@lru_cache(maxsize=None)
def ordered_pairs(k: int) -> np.ndarray:
    """All ordered concept pairs ``(l1, l2)`` with ``l1 != l2``, lexicographic.

    Returns a read-only integer array of shape ``(k * (k - 1), 2)``.  The row
    position of a pair is its packed pair index used throughout the package.
    """
    if k < 2:
        raise ValueError(f"need at least 2 concepts, got k={k}")
    pairs = np.array(
        [(l1, l2) for l1 in range(k) for l2 in range(k) if l1 != l2],
        dtype=np.intp,
    )
    pairs.setflags(write=False)
    return pairs


def pair_count(k: int) -> int:
    return k * (k - 1)


def pair_index(l1: int, l2: int, k: int) -> int:
    """Packed index of the ordered pair ``(l1, l2)`` among all distinct pairs."""
    if not (0 <= l1 < k and 0 <= l2 < k):
        raise IndexError(f"concept ids ({l1}, {l2}) out of range for k={k}")
    if l1 == l2:
        raise ValueError(f"diagonal concept pair ({l1}, {l1}) does not exist")
    return l1 * (k - 1) + (l2 if l2 < l1 else l2 - 1)


def state_count(b: int, k: int) -> int:
    return b * pair_count(k)


@dataclass(frozen=True, order=True)
class StateIndex:
    """Composite HMM state: context ``j`` plus ordered concept pair ``(l1, l2)``."""

    j: int
    l1: int
    l2: int

    def to_flat(self, k: int) -> int:
        """Linear index in ``[0, b * k * (k - 1))``; context-major, then pair."""
        return self.j * pair_count(k) + pair_index(self.l1, self.l2, k)

    @classmethod
    def from_flat(cls, flat: int, k: int) -> "StateIndex":
        p = pair_count(k)
        if flat < 0:
            raise IndexError(f"negative state index {flat}")
        j, pair = divmod(flat, p)
        l1, l2 = ordered_pairs(k)[pair]
        return cls(j=j, l1=int(l1), l2=int(l2))

    def check(self, b: int, k: int) -> "StateIndex":
        """Raise if the state does not exist in a model of size (b, k)."""
        if not 0 <= self.j < b:
            raise IndexError(f"context id {self.j} out of range for b={b}")
        pair_index(self.l1, self.l2, k)  # range + diagonal check
        return self


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Full parameter set of the model.

    Attributes
    ----------
    sigma : float
        Standard deviation of the relation-vector noise, per coordinate.
        A fixed hyperparameter; it is never reestimated.
    pi : ndarray, shape (b,)
        Initial context distribution.
    trans : ndarray, shape (b, b)
        Context transition matrix, rows stochastic.
    f : ndarray, shape (b, k * (k - 1))
        Concept-pair distribution per context, over the packed ordered-pair
        index of :func:`ordered_pairs`.
    q : ndarray, shape (k, n)
        Entity membership distribution per concept, rows stochastic.
    v : ndarray, shape (k * (k - 1), d)
        Relation vector per ordered concept pair, packed like ``f`` rows.
    entity_names : tuple of str, length n
        Display names for entities; auto-generated when not supplied.

    Instances are immutable (arrays are read-only), so they are safe to share
    across threads and processes.
    """

    sigma: float
    pi: np.ndarray
    trans: np.ndarray
    f: np.ndarray
    q: np.ndarray
    v: np.ndarray
    entity_names: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "pi", _frozen(self.pi))
        object.__setattr__(self, "trans", _frozen(self.trans))
        object.__setattr__(self, "f", _frozen(self.f))
        object.__setattr__(self, "q", _frozen(self.q))
        object.__setattr__(self, "v", _frozen(self.v))
        object.__setattr__(self, "sigma", float(self.sigma))
        if self.pi.ndim != 1:
            raise ValueError(f"pi must be a vector, got shape {self.pi.shape}")
        if self.q.ndim != 2:
            raise ValueError(f"q must be a (k, n) matrix, got shape {self.q.shape}")
        b = self.pi.shape[0]
        k = self.q.shape[0]
        p = pair_count(k) if k >= 2 else -1
        if self.trans.shape != (b, b):
            raise ValueError(f"trans must be ({b}, {b}), got {self.trans.shape}")
        if k < 2:
            raise ValueError(f"need at least 2 concepts, got k={k}")
        if self.f.shape != (b, p):
            raise ValueError(f"f must be ({b}, {p}) over ordered pairs, got {self.f.shape}")
        if self.v.ndim != 2 or self.v.shape[0] != p:
            raise ValueError(f"v must be ({p}, d), got {self.v.shape}")
        names = self.entity_names
        if names is None:
            names = tuple(f"e{i}" for i in range(self.n))
        else:
            names = tuple(str(s) for s in names)
            if len(names) != self.n:
                raise ValueError(
                    f"entity_names has {len(names)} entries for n={self.n} entities"
                )
        object.__setattr__(self, "entity_names", names)

    # sizes
    @property
    def b(self) -> int:
        return self.pi.shape[0]

    @property
    def k(self) -> int:
        return self.q.shape[0]

    @property
    def n(self) -> int:
        return self.q.shape[1]

    @property
    def d(self) -> int:
        return self.v.shape[1]

    @property
    def n_states(self) -> int:
        return state_count(self.b, self.k)

    @property
    def pairs(self) -> np.ndarray:
        return ordered_pairs(self.k)

    # Gaussian emission constants, computed on demand
    @property
    def gauss_norm(self) -> float:
        """Normalization constant of the d-dimensional isotropic Gaussian."""
        return (2.0 * math.pi * self.sigma**2) ** (-self.d / 2.0)

    @property
    def gauss_decay(self) -> float:
        """Coefficient of the squared distance in the Gaussian exponent."""
        return 1.0 / (2.0 * self.sigma**2)

    def f_dense(self) -> np.ndarray:
        """Concept-pair distributions as (b, k, k) with zeros on the diagonal."""
        out = np.zeros((self.b, self.k, self.k))
        pairs = self.pairs
        out[:, pairs[:, 0], pairs[:, 1]] = self.f
        return out

    def v_dense(self) -> np.ndarray:
        """Relation vectors as (k, k, d); diagonal entries are NaN (undefined)."""
        out = np.full((self.k, self.k, self.d), np.nan)
        pairs = self.pairs
        out[pairs[:, 0], pairs[:, 1]] = self.v
        return out

    @classmethod
    def from_dense(cls, sigma, pi, trans, f_dense, q, v_dense, entity_names=None):
        """Build from dense (b, k, k) / (k, k, d) tensors.

        Diagonal entries of ``f_dense`` must be zero (or NaN) and diagonal
        entries of ``v_dense`` are ignored; a nonzero diagonal in ``f_dense``
        is rejected because no self-pair state exists.
        """
        f_dense = np.asarray(f_dense, dtype=float)
        v_dense = np.asarray(v_dense, dtype=float)
        k = f_dense.shape[1]
        diag = f_dense[:, range(k), range(k)]
        bad = np.nan_to_num(diag) != 0.0
        if bad.any():
            j, l = np.argwhere(bad)[0]
            raise ValueError(
                f"diagonal concept pair: f[{j}][{l}][{l}] = {diag[j, l]} must be absent"
            )
        pairs = ordered_pairs(k)
        return cls(
            sigma=sigma,
            pi=pi,
            trans=trans,
            f=f_dense[:, pairs[:, 0], pairs[:, 1]],
            q=q,
            v=v_dense[pairs[:, 0], pairs[:, 1]],
            entity_names=entity_names,
        )


def _check_rows(name: str, rows: np.ndarray, violations: list):
    rows = np.atleast_2d(rows)
    if not np.isfinite(rows).all():
        violations.append(f"{name} contains non-finite entries")
        return
    if (rows < 0).any() or (rows > 1).any():
        where = np.argwhere((rows < 0) | (rows > 1))[0]
        violations.append(
            f"{name} entry at {tuple(int(i) for i in where)} outside [0, 1]"
        )
    sums = rows.sum(axis=1)
    for i, s in enumerate(sums):
        if abs(s - 1.0) > PROB_TOL:
            violations.append(f"{name} row {i} sums to {s!r}, expected 1")


def validate(params: ModelParams) -> list:
    """Check every stochastic constraint; return violation messages (empty = ok).

    Violations are reported as data rather than raised, so callers can
    collect and display all of them at once.
    """
    violations: list = []
    if not params.sigma > 0:
        violations.append(f"sigma must be positive, got {params.sigma}")
    _check_rows("pi", params.pi[None, :], violations)
    _check_rows("trans", params.trans, violations)
    _check_rows("f", params.f, violations)
    _check_rows("q", params.q, violations)
    if not np.isfinite(params.v).all():
        violations.append("v contains non-finite entries")
    # pi gets reported as "pi row 0"; rewrite for readability
    violations = [v.replace("pi row 0", "pi") for v in violations]
    return violations


def require_valid(params: ModelParams) -> ModelParams:
    """Raise ValueError listing all constraint violations, if any."""
    violations = validate(params)
    if violations:
        raise ValueError("invalid model parameters: " + "; ".join(violations))
    return params


def initial_probability(params: ModelParams, state: StateIndex) -> float:
    """Probability that the composite HMM starts in ``state``.

    Factors as the initial context probability times the context's
    concept-pair probability; summed over all states it equals 1.
    """
    state.check(params.b, params.k)
    return float(params.pi[state.j] * params.f[state.j, pair_index(state.l1, state.l2, params.k)])


def transition_probability(params: ModelParams, src: StateIndex, dst: StateIndex) -> float:
    """Composite transition probability from ``src`` to ``dst``.

    Depends on ``src`` only through its context: the context chain steps
    first, then the new concept pair is drawn from the new context.
    """
    src.check(params.b, params.k)
    dst.check(params.b, params.k)
    return float(
        params.trans[src.j, dst.j]
        * params.f[dst.j, pair_index(dst.l1, dst.l2, params.k)]
    )


def emission_density(params: ModelParams, state: StateIndex, obs) -> float:
    """Density of observing a triple ``(subject, r, object)`` in ``state``.

    This is a probability density in the relation vector (it may exceed 1).
    It is zero exactly when either membership factor is zero.
    """
    state.check(params.b, params.k)
    subject, r, obj = obs
    r = np.asarray(r, dtype=float)
    if r.shape != (params.d,):
        raise ValueError(f"relation vector has shape {r.shape}, expected ({params.d},)")
    diff = r - params.v[pair_index(state.l1, state.l2, params.k)]
    return float(
        params.q[state.l1, subject]
        * params.q[state.l2, obj]
        * params.gauss_norm
        * math.exp(-params.gauss_decay * float(diff @ diff))
    )


# ---------------------------------------------------------------------------
# model file (JSON) serialization


def _dense_nullable_f(params: ModelParams) -> list:
    dense = params.f_dense().tolist()
    for j in range(params.b):
        for l in range(params.k):
            dense[j][l][l] = None
    return dense


def _dense_nullable_v(params: ModelParams) -> list:
    pairs = params.pairs
    out = [[None] * params.k for _ in range(params.k)]
    for p, (l1, l2) in enumerate(pairs):
        out[l1][l2] = params.v[p].tolist()
    return out


def to_model_dict(params: ModelParams) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "b": params.b,
        "k": params.k,
        "n": params.n,
        "d": params.d,
        "sigma": params.sigma,
        "pi": params.pi.tolist(),
        "trans": params.trans.tolist(),
        "f": _dense_nullable_f(params),
        "q": params.q.tolist(),
        "v": _dense_nullable_v(params),
        "entity_names": list(params.entity_names),
    }


def validate_model_dict(doc: dict) -> list:
    """Structural checks on a parsed model file; returns violation messages."""
    violations: list = []
    if not isinstance(doc, dict):
        return ["model file is not a JSON object"]
    if doc.get("version") != MODEL_FORMAT_VERSION:
        violations.append(
            f"unsupported version {doc.get('version')!r}, expected {MODEL_FORMAT_VERSION!r}"
        )
    for key in ("b", "k", "n", "d", "sigma", "pi", "trans", "f", "q", "v", "entity_names"):
        if key not in doc:
            violations.append(f"missing field {key!r}")
    if violations:
        return violations
    b, k, n, d = doc["b"], doc["k"], doc["n"], doc["d"]
    f, v = doc["f"], doc["v"]
    try:
        if np.asarray(doc["pi"], dtype=float).shape != (b,):
            violations.append("pi has wrong shape")
        if np.asarray(doc["trans"], dtype=float).shape != (b, b):
            violations.append("trans has wrong shape")
        if np.asarray(doc["q"], dtype=float).shape != (k, n):
            violations.append("q has wrong shape")
        if len(doc["entity_names"]) != n:
            violations.append("entity_names has wrong length")
        for j in range(b):
            for l1 in range(k):
                for l2 in range(k):
                    cell = f[j][l1][l2]
                    if l1 == l2 and cell is not None:
                        violations.append(
                            f"diagonal concept pair: f[{j}][{l1}][{l2}] must be null"
                        )
                    if l1 != l2 and not isinstance(cell, (int, float)):
                        violations.append(f"f[{j}][{l1}][{l2}] is not a number")
        for l1 in range(k):
            for l2 in range(k):
                cell = v[l1][l2]
                if l1 == l2 and cell is not None:
                    violations.append(
                        f"diagonal concept pair: v[{l1}][{l2}] must be null"
                    )
                if l1 != l2 and (
                    not isinstance(cell, list)
                    or len(cell) != d
                    or not all(isinstance(x, (int, float)) for x in cell)
                ):
                    violations.append(f"v[{l1}][{l2}] is not a length-{d} vector")
    except (TypeError, IndexError, ValueError) as exc:
        violations.append(f"malformed field: {exc}")
    return violations


def from_model_dict(doc: dict) -> ModelParams:
    violations = validate_model_dict(doc)
    if violations:
        raise ValueError("invalid model file: " + "; ".join(violations))
    k, d = doc["k"], doc["d"]
    f_dense = np.array(
        [[[0.0 if c is None else c for c in row] for row in ctx] for ctx in doc["f"]]
    )
    v_dense = np.array(
        [[([np.nan] * d if c is None else c) for c in row] for row in doc["v"]]
    )
    params = ModelParams.from_dense(
        sigma=doc["sigma"],
        pi=doc["pi"],
        trans=doc["trans"],
        f_dense=f_dense,
        q=doc["q"],
        v_dense=v_dense,
        entity_names=doc["entity_names"],
    )
    if params.n != doc["n"]:
        raise ValueError(f"n={doc['n']} does not match q with {params.n} columns")
    return require_valid(params)


def save_model(params: ModelParams, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_model_dict(params), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> ModelParams:
    with open(path, "r", encoding="utf-8") as fh:
        return from_model_dict(json.load(fh))
