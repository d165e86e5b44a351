"""Exhaustive-enumeration likelihood, used as a testing oracle.

Computes history probabilities by summing over every latent outcome an
individual can realise: recruitment period, last attended period, and per
attended period the arrival occasion, departure occasion and state path.
Everything is derived directly from the natural parameters (``r``, ``s``,
``beta``, ``alpha``, ``Psi``, ``phi``, ``p``); none of the hidden-Markov
matrices, conditional probabilities or forward recursions are reused, so
agreement with :func:`stopover.hmm.primary_likelihood` checks the whole
pipeline.  Cost grows exponentially, hence the hard path-space bound.
"""

from itertools import product

import numpy as np

from .errors import PathSpaceError
from .params import retention_probability, survival_probability

MAX_PATHS = 10_000_000


def _secondary_path_count(design, t):
    K, G = design.K[t - 1], design.G
    return sum(G ** (k1 - k0 + 1) for k0 in range(1, K + 1) for k1 in range(k0, K + 1))


def path_space_size(design):
    """Upper bound on the number of latent paths explored per history."""
    total = 0
    per_period = [_secondary_path_count(design, t) for t in range(1, design.T + 1)]
    for b in range(1, design.T + 1):
        for e in range(b, design.T + 1):
            size = 1
            for t in range(b, e + 1):
                size *= per_period[t - 1]
            total += size
    return total


def _attendance_probability(params, b, e):
    """P(recruit in b, last attended period e)."""
    d = params.design
    out = params.r[b - 1]
    for t in range(b, e):
        out *= survival_probability(params, t - b + 1, t)
    if e < d.T:
        out *= 1.0 - survival_probability(params, e - b + 1, e)
    return out


def secondary_brute_force(history_slice, params, t):
    """Within-period likelihood of one slice by summing over arrival occasion,
    departure occasion and state path."""
    d = params.design
    i = t - 1
    K, G = d.K[i], d.G
    x = np.asarray(history_slice, dtype=np.int64)
    beta, alpha, Psi, cap = params.beta[i], params.alpha[i], params.Psi[i], params.p[i]
    total = 0.0
    for k0 in range(1, K + 1):
        if x[: k0 - 1].any():
            continue
        for k1 in range(k0, K + 1):
            if x[k1:].any():
                continue
            stay = 1.0
            for k in range(k0, k1):
                stay *= retention_probability(params, t, k - k0 + 1, k)
            if k1 < K:
                stay *= 1.0 - retention_probability(params, t, k1 - k0 + 1, k1)
            if stay == 0.0:
                continue
            span = k1 - k0 + 1
            for states in product(range(1, G + 1), repeat=span):
                prob = beta[k0 - 1] * stay * alpha[states[0] - 1]
                for step in range(span - 1):
                    prob *= Psi[states[step] - 1, states[step + 1] - 1]
                if prob == 0.0:
                    continue
                for k in range(k0, k1 + 1):
                    g = states[k - k0]
                    pk = cap[g - 1, k - k0, k - 1]
                    if x[k - 1] == 0:
                        prob *= 1.0 - pk
                    elif x[k - 1] == g:
                        prob *= pk
                    else:
                        prob = 0.0
                        break
                total += prob
    return total


def brute_force_likelihood(history, params):
    """Probability of a full capture history by latent-path enumeration.

    Mathematically identical to :func:`stopover.hmm.primary_likelihood`;
    refuses designs whose path space exceeds ``MAX_PATHS``.
    """
    d = params.design
    size = path_space_size(d)
    if size > MAX_PATHS:
        raise PathSpaceError(f"path space ~{size} exceeds the enumeration bound {MAX_PATHS}")
    history = np.asarray(history, dtype=np.int64).reshape(-1)
    slices = [history[d.period_columns(t)] for t in range(1, d.T + 1)]
    zero = [not s.any() for s in slices]
    sec = {}
    total = 0.0
    for b in range(1, d.T + 1):
        for e in range(b, d.T + 1):
            if not all(zero[t - 1] for t in range(1, b)):
                continue
            if not all(zero[t - 1] for t in range(e + 1, d.T + 1)):
                continue
            w = _attendance_probability(params, b, e)
            if w == 0.0:
                continue
            for t in range(b, e + 1):
                if t not in sec:
                    sec[t] = secondary_brute_force(slices[t - 1], params, t)
                w *= sec[t]
                if w == 0.0:
                    break
            total += w
    return total


def enumerate_histories(design):
    """All possible capture histories of a design (availability-aware).

    Yields every outcome sequence, including the all-zero history; intended
    for total-probability checks on tiny designs.
    """
    alphabets = []
    for t in range(1, design.T + 1):
        symbols = (0,) + design.availability[t - 1]
        alphabets.extend([symbols] * design.K[t - 1])
    space = 1
    for a in alphabets:
        space *= len(a)
    if space > MAX_PATHS:
        raise PathSpaceError(f"outcome space {space} exceeds the enumeration bound {MAX_PATHS}")
    for combo in product(*alphabets):
        yield np.array(combo, dtype=np.int64)
