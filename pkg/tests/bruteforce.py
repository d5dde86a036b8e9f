"""Reference implementations by exhaustive enumeration.

Everything here goes through the scalar per-state operations and explicit
sums over state sequences, never through the vectorized scaled passes, so
these results are independent checks of the fast code paths.
"""

import itertools

import numpy as np

from concepthmm.inference import Posteriors, joint_density
from concepthmm.model import (
    StateIndex,
    emission_density,
    initial_probability,
    pair_count,
    state_count,
    transition_probability,
)


def all_states(b, k):
    return [StateIndex.from_flat(i, k) for i in range(state_count(b, k))]


def enumerate_likelihood(params, doc):
    """P(O) as the sum of the joint density over all N^T state sequences."""
    states = all_states(params.b, params.k)
    return sum(
        joint_density(params, doc, seq)
        for seq in itertools.product(states, repeat=len(doc))
    )


def enumerate_posteriors(params, doc):
    """(gamma, xi, likelihood) by explicit summation over state sequences."""
    states = all_states(params.b, params.k)
    N = len(states)
    T = len(doc)
    gamma = np.zeros((T, N))
    xi = np.zeros((max(T - 1, 0), N, N))
    total = 0.0
    for seq in itertools.product(range(N), repeat=T):
        w = joint_density(params, doc, [states[i] for i in seq])
        total += w
        for t, s in enumerate(seq):
            gamma[t, s] += w
            if t + 1 < T:
                xi[t, s, seq[t + 1]] += w
    gamma /= total
    xi /= total
    return gamma, xi, total


def posteriors_from_enumeration(params, doc):
    """A full Posteriors bundle built from the enumerated gamma and xi."""
    gamma, xi, total = enumerate_posteriors(params, doc)
    T = len(doc)
    b, k = params.b, params.k
    p = pair_count(k)
    pairs = params.pairs
    gbp = gamma.reshape(T, b, p)
    gamma_packed = gbp.sum(axis=1)
    gamma_pair = np.zeros((T, k, k))
    gamma_pair[:, pairs[:, 0], pairs[:, 1]] = gamma_packed
    gamma_first = np.zeros((T, k))
    gamma_second = np.zeros((T, k))
    for idx, (l1, l2) in enumerate(pairs):
        gamma_first[:, l1] += gamma_packed[:, idx]
        gamma_second[:, l2] += gamma_packed[:, idx]
    return Posteriors(
        log_likelihood=float(np.log(total)),
        gamma=gamma,
        gamma_context=gbp.sum(axis=2),
        gamma_pair=gamma_pair,
        gamma_first_concept=gamma_first,
        gamma_second_concept=gamma_second,
        xi_context=xi.reshape(T - 1, b, p, b, p).sum(axis=(2, 4)),
    )


def unscaled_forward_likelihood(params, doc):
    """Likelihood by the plain (unscaled) forward recursion on dense matrices."""
    states = all_states(params.b, params.k)
    obs = list(zip(doc.subjects, doc.relations, doc.objects))
    emis = lambda t: np.array([emission_density(params, s, obs[t]) for s in states])
    a_mat = np.array(
        [[transition_probability(params, s, s2) for s2 in states] for s in states]
    )
    alpha = np.array([initial_probability(params, s) for s in states]) * emis(0)
    for t in range(1, len(doc)):
        alpha = (alpha @ a_mat) * emis(t)
    return float(alpha.sum())


def naive_xi_context(alpha, beta, params, doc, log_scales):
    """Context-hop posteriors via the full quadruple sum per step.

    Builds the complete per-step transition posterior over composite-state
    pairs from the scaled trellises, then sums out both pair slots.
    """
    from concepthmm.inference import emission_matrix

    E = emission_matrix(params, doc)
    T = len(doc)
    b, p = params.f.shape
    scales = np.exp(log_scales)
    out = np.empty((T - 1, b, b))
    for t in range(T - 1):
        full = (
            alpha[t][:, :, None, None]
            * params.trans[:, None, :, None]
            * params.f[None, None, :, :]
            * E[t + 1][None, None, None, :]
            * beta[t + 1][None, None, :, :]
            / scales[t + 1]
        )
        out[t] = full.sum(axis=(1, 3))
    return out
