"""Maximum-likelihood fitting by expectation-maximization.

Each iteration runs one forward-backward sweep and rebuilds every parameter
block from the posterior marginals:

* initial context distribution: first-step context posterior;
* context transitions: expected hop counts over expected visits;
* pair distributions: expected pair-in-context counts over context counts;
* memberships: expected subject-slot plus object-slot occurrences of each
  entity under each concept, normalized per concept;
* relation vectors: posterior-weighted means of the observed vectors.

The noise scale ``sigma`` is a fixed hyperparameter and is never updated.
Fitting restarts from several random initializations and keeps the restart
with the best final log-likelihood; restart seeds are ``seed + index`` so
runs are reproducible regardless of worker count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .inference import Posteriors, ZeroLikelihoodError, forward, posteriors
from .model import ModelParams, pair_count
from .triples import Document

log = logging.getLogger(__name__)

#: posterior mass below which a denominator is treated as dead
DEAD_MASS = 1e-12


@dataclass(frozen=True)
class FitConfig:
    """Knobs of the EM loop.

    ``epsilon`` bounds the largest absolute change of any parameter entry
    between consecutive iterations; iteration stops when the change drops
    below it or ``max_iters`` is reached.  ``smoothing_floor`` keeps
    membership (and dead-pair) probabilities from freezing at exact zero.
    """

    epsilon: float = 1e-4
    max_iters: int = 500
    restarts: int = 10
    seed: int = 0
    smoothing_floor: float = 1e-9

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.smoothing_floor < 0:
            raise ValueError("smoothing_floor must be nonnegative")


@dataclass
class FitResult:
    """Best restart of a fit plus the bookkeeping of all restarts.

    ``loglik_trace`` holds the log-likelihood evaluated at the start of each
    iteration of the winning restart, followed by the final model's value;
    it is non-decreasing up to the tiny perturbation of the smoothing floor.
    ``restart_logliks`` has one final log-likelihood per restart, ``-inf``
    for restarts discarded after a zero-likelihood failure.
    """

    params: ModelParams
    loglik_trace: list
    iterations_used: int
    restart_logliks: list
    chosen_restart: int

    def report_dict(self) -> dict:
        return {
            "restart_logliks": [
                None if not np.isfinite(x) else float(x) for x in self.restart_logliks
            ],
            "chosen_restart": self.chosen_restart,
            "iterations": self.iterations_used,
            "trace": [float(x) for x in self.loglik_trace],
        }


def param_delta(a: ModelParams, b: ModelParams) -> float:
    """Largest absolute entrywise difference across all parameter blocks."""
    return max(
        float(np.abs(x - y).max())
        for x, y in (
            (a.pi, b.pi),
            (a.trans, b.trans),
            (a.f, b.f),
            (a.q, b.q),
            (a.v, b.v),
        )
    )


def init_random(
    b: int, k: int, n: int, d: int, sigma: float, doc: Document, seed: int
) -> ModelParams:
    """Random starting parameters.

    Stochastic rows are flat-Dirichlet draws.  Relation vectors start at
    observed vectors sampled from the document, jittered with Gaussian noise
    of scale ``sigma / 2`` so distinct pairs rarely coincide exactly.
    """
    if len(doc) < 1:
        raise ValueError("document must be nonempty")
    if doc.dim != d:
        raise ValueError(f"document dimension {doc.dim} does not match d={d}")
    if doc.n_entities > n:
        raise ValueError(f"document has {doc.n_entities} entities, n={n} too small")
    rng = np.random.default_rng(seed)
    p = pair_count(k)
    picks = rng.integers(0, len(doc), size=p)
    return ModelParams(
        sigma=sigma,
        pi=rng.dirichlet(np.ones(b)),
        trans=rng.dirichlet(np.ones(b), size=b),
        f=rng.dirichlet(np.ones(p), size=b),
        q=rng.dirichlet(np.ones(n), size=k),
        v=doc.relations[picks] + rng.normal(0.0, sigma / 2.0, size=(p, d)),
        entity_names=doc.entity_names + tuple(f"e{i}" for i in range(doc.n_entities, n)),
    )


def _floored_rows(rows: np.ndarray, floor: float) -> np.ndarray:
    out = np.maximum(rows, floor)
    return out / out.sum(axis=1, keepdims=True)


def _normalized_rows(rows: np.ndarray) -> np.ndarray:
    # keeps every entry at or below 1 exactly: a ratio of a term to its sum
    return rows / rows.sum(axis=-1, keepdims=True)


def reestimate(
    params: ModelParams,
    doc: Document,
    post: Posteriors,
    smoothing_floor: float = 1e-9,
) -> ModelParams:
    """One EM update of every parameter block except sigma.

    ``post`` must be the posteriors of ``(params, doc)``.  Denominators with
    effectively no posterior mass keep the previous value of their block:
    a concept pair never visited keeps its relation vector, and its pair
    probabilities are floored before renormalization; membership rows are
    floored unconditionally so an entity can never be locked out forever by
    an exact zero.
    """
    T = len(doc)
    b, k, p = params.b, params.k, pair_count(params.k)
    gamma_bp = post.gamma.reshape(T, b, p)

    new_pi = _normalized_rows(post.gamma_context[0])

    # context transitions: expected hops over expected visits before step T
    hop = post.xi_context.sum(axis=0)  # (b, b)
    visits = post.gamma_context[:-1].sum(axis=0) if T > 1 else np.zeros(b)
    new_trans = np.array(params.trans)
    live = visits > DEAD_MASS
    new_trans[live] = _normalized_rows(hop[live] / visits[live, None])

    # pair distributions per context
    pair_in_ctx = gamma_bp.sum(axis=0)  # (b, p)
    ctx_mass = post.gamma_context.sum(axis=0)  # (b,)
    new_f = np.array(params.f)
    live = ctx_mass > DEAD_MASS
    new_f[live] = pair_in_ctx[live] / ctx_mass[live, None]
    pair_mass = gamma_bp.sum(axis=(0, 1))  # (p,)
    dead_pairs = pair_mass < DEAD_MASS
    if smoothing_floor > 0 and dead_pairs.any():
        new_f[:, dead_pairs] = np.maximum(new_f[:, dead_pairs], smoothing_floor)
    new_f /= new_f.sum(axis=1, keepdims=True)

    # memberships: pool subject-slot and object-slot evidence per entity
    num = np.zeros((params.n, k))
    np.add.at(num, doc.subjects, post.gamma_first_concept)
    np.add.at(num, doc.objects, post.gamma_second_concept)
    den = post.gamma_first_concept.sum(axis=0) + post.gamma_second_concept.sum(axis=0)
    new_q = np.array(params.q)
    live = den > DEAD_MASS
    new_q[live] = num.T[live] / den[live, None]
    new_q = (
        _floored_rows(new_q, smoothing_floor)
        if smoothing_floor > 0
        else _normalized_rows(new_q)
    )

    # relation vectors: posterior-weighted means of observed vectors
    pair_w = gamma_bp.sum(axis=1)  # (T, p)
    new_v = np.array(params.v)
    live = pair_mass >= DEAD_MASS
    new_v[live] = (pair_w.T[live] @ doc.relations) / pair_mass[live, None]

    return ModelParams(
        sigma=params.sigma,
        pi=new_pi,
        trans=new_trans,
        f=new_f,
        q=new_q,
        v=new_v,
        entity_names=params.entity_names,
    )


def _smoothed(params: ModelParams, floor: float) -> ModelParams:
    """Floor memberships and pair probabilities so no emission can vanish."""
    floor = max(floor, 1e-9)
    return ModelParams(
        sigma=params.sigma,
        pi=params.pi,
        trans=params.trans,
        f=_floored_rows(params.f, floor),
        q=_floored_rows(params.q, floor),
        v=params.v,
        entity_names=params.entity_names,
    )


@dataclass
class _RestartOutcome:
    params: ModelParams = None
    trace: list = field(default_factory=list)
    iterations: int = 0
    log_likelihood: float = -np.inf
    failed_at: int = None


def _run_restart(
    doc: Document, b, k, d, sigma, config: FitConfig, restart: int
) -> _RestartOutcome:
    params = init_random(b, k, doc.n_entities, d, sigma, doc, config.seed + restart)
    trace = []
    iterations = 0
    for _ in range(config.max_iters):
        try:
            post = posteriors(params, doc)
        except ZeroLikelihoodError:
            params = _smoothed(params, config.smoothing_floor)
            try:
                post = posteriors(params, doc)
            except ZeroLikelihoodError as err:
                log.warning(
                    "restart %d discarded: zero likelihood at step %d even after smoothing",
                    restart,
                    err.t,
                )
                return _RestartOutcome(trace=trace, iterations=iterations, failed_at=err.t)
        trace.append(post.log_likelihood)
        updated = reestimate(params, doc, post, config.smoothing_floor)
        delta = param_delta(updated, params)
        params = updated
        iterations += 1
        log.info(
            "restart %d iteration %d: log-likelihood %.6f, max change %.3e",
            restart, iterations, post.log_likelihood, delta,
        )
        if delta < config.epsilon:
            break
    final_ll = forward(params, doc).log_likelihood
    trace.append(final_ll)
    return _RestartOutcome(
        params=params, trace=trace, iterations=iterations, log_likelihood=final_ll
    )


def fit(
    doc: Document,
    b: int,
    k: int,
    d: int,
    sigma: float,
    config: FitConfig = FitConfig(),
    n_jobs: int = 1,
) -> FitResult:
    """Fit model parameters to a document by multi-restart EM.

    Restarts are independent given their derived seeds, so they can run in
    parallel workers (``n_jobs``) without changing the result.  The best
    restart is the one with the highest final log-likelihood; ties go to
    the lowest restart index.
    """
    if len(doc) < 1:
        raise ValueError("document must be nonempty")
    if d != doc.dim:
        raise ValueError(f"d={d} does not match document dimension {doc.dim}")
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_run_restart)(doc, b, k, d, sigma, config, r)
        for r in range(config.restarts)
    )
    logliks = [o.log_likelihood for o in outcomes]
    best = int(np.argmax(logliks))
    if outcomes[best].params is None:
        raise RuntimeError(
            "every restart hit a zero-likelihood document even after smoothing"
        )
    chosen = outcomes[best]
    return FitResult(
        params=chosen.params,
        loglik_trace=chosen.trace,
        iterations_used=chosen.iterations,
        restart_logliks=logliks,
        chosen_restart=best,
    )
