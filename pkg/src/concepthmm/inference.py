"""Scaled forward-backward inference over the composite HMM.

All trellises are kept in a factored (T, b, P) layout where P is the number
of ordered concept pairs; the flat composite-state index is context-major,
matching :meth:`concepthmm.model.StateIndex.to_flat`.

Scaling convention.  Each forward column is normalized to sum to one and the
normalizer ``c_t`` is logged, so

    alpha_hat[t] = alpha[t] / (c_1 ... c_t),      log P(O) = sum_t log c_t.

The backward trellis is scaled with the *future* normalizers only,

    beta_hat[t] = beta[t] / (c_{t+1} ... c_T),    beta_hat[T] = 1,

which makes ``sum_s alpha_hat[t, s] * beta_hat[t, s] == 1`` for every t, and
lets state posteriors be read off as ``gamma = alpha_hat * beta_hat``
without further division.

Two structural shortcuts keep each step at O(b*P + b^2) instead of a dense
O((b*P)^2) matrix product:

* the emission density does not depend on the context index, so emissions
  are computed once per (step, pair) and shared across contexts;
* transition probabilities factor into a context hop times a pair draw from
  the destination context, so the sum over source states collapses to the
  source's context marginal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, StateIndex, pair_index
from .triples import Document


class ZeroLikelihoodError(ValueError):
    """The document has probability zero under the model.

    Raised when every composite state assigns zero density to the
    observation at some step, typically because an entity has zero
    membership in every concept.  Callers may smooth the offending
    distributions and retry.
    """

    def __init__(self, t: int):
        self.t = t
        super().__init__(
            f"observation at step {t} is impossible under the model "
            "(all states have zero emission density)"
        )


@dataclass(frozen=True, eq=False)
class ForwardResult:
    """Scaled forward trellis with its per-step log normalizers."""

    alpha: np.ndarray  # (T, b, P), each step sums to 1
    log_scales: np.ndarray  # (T,), log c_t
    log_likelihood: float


@dataclass(frozen=True, eq=False)
class Posteriors:
    """State posteriors of a document and the marginals reestimation needs.

    ``gamma`` is indexed by the flat composite-state id; the wildcard
    marginals sum it over contexts and/or pair slots.  ``xi_context`` holds
    the posterior probability of hopping between contexts at successive
    steps, already summed over both concept pairs.
    """

    log_likelihood: float
    gamma: np.ndarray  # (T, N)
    gamma_context: np.ndarray  # (T, b)
    gamma_pair: np.ndarray  # (T, k, k), zero diagonal
    gamma_first_concept: np.ndarray  # (T, k)
    gamma_second_concept: np.ndarray  # (T, k)
    xi_context: np.ndarray  # (T-1, b, b)


def _check_doc(params: ModelParams, doc: Document) -> None:
    if doc.dim != params.d:
        raise ValueError(
            f"document has {doc.dim}-dim relation vectors, model expects {params.d}"
        )
    if doc.n_entities > params.n:
        raise ValueError(
            f"document references {doc.n_entities} entities, model knows {params.n}"
        )


def emission_matrix(params: ModelParams, doc: Document) -> np.ndarray:
    """Per-step, per-pair emission densities, shape (T, P).

    Computed once and shared by forward, backward and posterior passes;
    the context index never enters the emission.
    """
    _check_doc(params, doc)
    pairs = params.pairs
    diff = doc.relations[:, None, :] - params.v[None, :, :]  # (T, P, d)
    sq = np.einsum("tpd,tpd->tp", diff, diff)
    gauss = params.gauss_norm * np.exp(-params.gauss_decay * sq)
    memb = params.q[pairs[:, 0]][:, doc.subjects] * params.q[pairs[:, 1]][:, doc.objects]
    return gauss * memb.T


def forward(params: ModelParams, doc: Document, emissions: np.ndarray = None) -> ForwardResult:
    """Scaled forward pass; also the likelihood computation.

    The unscaled trellis is recoverable as
    ``alpha[t] * exp(log_scales[:t + 1].sum())``.
    """
    if emissions is None:
        emissions = emission_matrix(params, doc)
    T = len(doc)
    b, p = params.f.shape
    fe = params.f[None, :, :] * emissions[:, None, :]  # (T, b, P)
    fe_ctx = fe.sum(axis=2)  # (T, b)
    # The recursion only needs the scaled context marginal of alpha: the sum
    # over source pairs collapses, so the sequential scan runs on length-b
    # vectors and the full trellis is reconstructed in one vectorized shot.
    ctx_in = np.empty((T, b))
    marg = np.empty((T, b))
    log_scales = np.empty(T)
    ctx_in[0] = params.pi
    for t in range(T):
        if t > 0:
            ctx_in[t] = marg[t - 1] @ params.trans
        col = ctx_in[t] * fe_ctx[t]
        total = col.sum()
        if total <= 0.0 or not np.isfinite(total):
            raise ZeroLikelihoodError(t)
        marg[t] = col / total
        log_scales[t] = np.log(total)
    alpha = ctx_in[:, :, None] * fe / np.exp(log_scales)[:, None, None]
    return ForwardResult(
        alpha=alpha, log_scales=log_scales, log_likelihood=float(log_scales.sum())
    )


def backward(
    params: ModelParams,
    doc: Document,
    log_scales: np.ndarray,
    emissions: np.ndarray = None,
) -> np.ndarray:
    """Scaled backward trellis, shape (T, b, P).

    ``log_scales`` must come from :func:`forward` on the same model and
    document.  The base column is all ones; column t is divided by the
    forward normalizer of column t+1, so ``(alpha_hat * beta_hat).sum()``
    is 1 at every step.
    """
    if emissions is None:
        emissions = emission_matrix(params, doc)
    T = len(doc)
    b, p = params.f.shape
    if log_scales.shape != (T,):
        raise ValueError(f"log_scales has shape {log_scales.shape}, expected ({T},)")
    if emissions.shape != (T, p):
        raise ValueError(f"emissions has shape {emissions.shape}, expected ({T}, {p})")
    # The backward value is constant across the pair slot of the state (a
    # transition only sees the context), so the scan runs on length-b
    # vectors and is broadcast to the full trellis at the end.
    fe_ctx = (params.f[None, :, :] * emissions[:, None, :]).sum(axis=2)  # (T, b)
    ctx = np.empty((T, b))
    ctx[T - 1] = 1.0
    scales = np.exp(log_scales)
    for t in range(T - 2, -1, -1):
        ctx[t] = (params.trans @ (fe_ctx[t + 1] * ctx[t + 1])) / scales[t + 1]
    return np.repeat(ctx[:, :, None], p, axis=2)


def xi_context_fast(
    alpha: np.ndarray,
    beta: np.ndarray,
    params: ModelParams,
    doc: Document,
    emissions: np.ndarray = None,
) -> np.ndarray:
    """Posterior context-hop probabilities, shape (T-1, b, b).

    Exploits the transition factorization: the sum over source pairs is the
    forward context marginal and the sum over destination pairs folds the
    pair draw, emission and backward value into one per-context weight.
    Each step therefore costs O(b*P + b^2) instead of the O(b^2 * P^2) of
    summing the full transition posterior.  Each step's matrix is
    normalized to total one, which also divides out the scale factor.
    """
    if emissions is None:
        emissions = emission_matrix(params, doc)
    T = len(doc)
    if alpha.shape != beta.shape or alpha.shape[0] != T:
        raise ValueError(
            f"trellis shapes {alpha.shape} / {beta.shape} do not match a length-{T} document"
        )
    src = alpha.sum(axis=2)  # (T, b): forward context marginals
    dst = np.einsum("jp,tp,tjp->tj", params.f, emissions, beta)  # (T, b)
    xi = src[:-1, :, None] * params.trans[None, :, :] * dst[1:, None, :]
    totals = xi.sum(axis=(1, 2), keepdims=True)
    return xi / totals


def posteriors(params: ModelParams, doc: Document) -> Posteriors:
    """Full posterior bundle from one forward-backward sweep."""
    emissions = emission_matrix(params, doc)
    fwd = forward(params, doc, emissions)
    beta = backward(params, doc, fwd.log_scales, emissions)
    T = len(doc)
    k = params.k
    pairs = params.pairs
    gamma_bp = fwd.alpha * beta  # (T, b, P), sums to 1 per step
    gamma_packed = gamma_bp.sum(axis=1)  # (T, P)
    gamma_pair = np.zeros((T, k, k))
    gamma_pair[:, pairs[:, 0], pairs[:, 1]] = gamma_packed
    gamma_first = np.zeros((T, k))
    gamma_second = np.zeros((T, k))
    np.add.at(gamma_first.T, pairs[:, 0], gamma_packed.T)
    np.add.at(gamma_second.T, pairs[:, 1], gamma_packed.T)
    return Posteriors(
        log_likelihood=fwd.log_likelihood,
        gamma=gamma_bp.reshape(T, -1),
        gamma_context=gamma_bp.sum(axis=2),
        gamma_pair=gamma_pair,
        gamma_first_concept=gamma_first,
        gamma_second_concept=gamma_second,
        xi_context=xi_context_fast(fwd.alpha, beta, params, doc, emissions),
    )


def joint_density(params: ModelParams, doc: Document, states) -> float:
    """Density of the document jointly with one explicit state sequence.

    The plain product of the initial probability, the stepwise transition
    probabilities and the per-step emission densities.  Deliberately written
    with the scalar per-state operations so it can serve as an independent
    reference for the vectorized passes; summing it over all N^T state
    sequences reproduces the forward likelihood.
    """
    from .model import (  # local import to keep the scalar route explicit
        emission_density,
        initial_probability,
        transition_probability,
    )

    states = [s if isinstance(s, StateIndex) else StateIndex(*s) for s in states]
    if len(states) != len(doc):
        raise ValueError(f"{len(states)} states for a length-{len(doc)} document")
    obs = list(zip(doc.subjects, doc.relations, doc.objects))
    density = initial_probability(params, states[0]) * emission_density(
        params, states[0], obs[0]
    )
    for t in range(1, len(states)):
        density *= transition_probability(params, states[t - 1], states[t])
        density *= emission_density(params, states[t], obs[t])
    return float(density)
