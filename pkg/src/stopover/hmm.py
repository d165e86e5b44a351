"""Nested hidden-Markov likelihood for multi-period stopover data.

Two chains are stacked.  The within-period chain for period ``t`` has
``a'(t) * G + 2`` hidden states ordered

    0                      not yet arrived
    1 + (a-1) * G + (g-1)  present at within-period age ``a`` in state ``g``
    a'(t) * G + 1          departed

and the between-period chain has ``A' + 2`` states (not yet recruited, primary
ages ``1..A'``, departed).  Emission matrices are diagonal, so they are carried
as vectors; the between-period emissions are the within-period likelihood
values, computed once per unique period slice and shared across histories.
All recursions run through :func:`stopover.kernels.forward_loglik`, which
rescales every step, so long studies (hundreds of occasions) do not underflow.
"""

import numpy as np
from scipy.special import gammaln

from .errors import ConstraintError
from .kernels import forward_loglik
from .params import conditional_arrival, conditional_recruitment


def build_secondary_initial(beta_t1, alpha_t, a_prime_t):
    """Initial distribution of the within-period chain.

    Mass ``1 - beta(t,1)`` on "not yet arrived" and ``beta(t,1) * alpha_g(t)``
    on the age-1 states; older ages and "departed" start empty.
    """
    alpha_t = np.asarray(alpha_t, dtype=float)
    G = alpha_t.size
    pi = np.zeros(a_prime_t * G + 2)
    pi[0] = 1.0 - beta_t1
    pi[1 : G + 1] = beta_t1 * alpha_t
    return pi


def build_secondary_transition(beta_star, alpha_t, phi_ages, Psi_t, a_prime_t):
    """One-step transition matrix of the within-period chain.

    Parameters
    ----------
    beta_star : float
        Conditional arrival probability for the *next* occasion.
    alpha_t : (G,) array
        Initial-state simplex.
    phi_ages : (a'(t)-1,) array
        Retention probabilities by current within-period age at this occasion.
    Psi_t : (G, G) array
        State transition matrix.
    a_prime_t : int
        Maximum within-period age.
    """
    alpha_t = np.asarray(alpha_t, dtype=float)
    Psi_t = np.asarray(Psi_t, dtype=float)
    phi_ages = np.asarray(phi_ages, dtype=float)
    G = alpha_t.size
    if Psi_t.shape != (G, G):
        raise ConstraintError("Psi must be G x G")
    if phi_ages.shape != (a_prime_t - 1,):
        raise ConstraintError("phi_ages must have one entry per age 1..a'(t)-1")
    S = a_prime_t * G + 2
    M = np.zeros((S, S))
    M[0, 0] = 1.0 - beta_star
    M[0, 1 : G + 1] = beta_star * alpha_t
    for a in range(1, a_prime_t):
        rows = slice(1 + (a - 1) * G, 1 + a * G)
        cols = slice(1 + a * G, 1 + (a + 1) * G)
        M[rows, cols] = phi_ages[a - 1] * Psi_t
        M[rows, S - 1] = 1.0 - phi_ages[a - 1]
    M[1 + (a_prime_t - 1) * G : 1 + a_prime_t * G, S - 1] = 1.0
    M[S - 1, S - 1] = 1.0
    return M


def build_observation_diagonal(outcome, p_slice, a_prime_t):
    """Diagonal of the within-period emission matrix for one outcome.

    ``p_slice[g-1, a-1]`` is the capture probability in state ``g`` at
    within-period age ``a`` on this occasion.  Outcome 0 (not captured) gives
    ``1 - p`` on every present state and 1 on the boundary states; outcome
    ``g`` places ``p`` on the matching state at every age.  Summed over
    outcomes ``0..G`` the diagonals give the all-ones vector.
    """
    p_slice = np.asarray(p_slice, dtype=float)
    G = p_slice.shape[0]
    if p_slice.shape != (G, a_prime_t):
        raise ConstraintError("p_slice must have shape (G, a'(t))")
    if not 0 <= outcome <= G:
        raise ConstraintError(f"outcome must lie in 0..{G}")
    S = a_prime_t * G + 2
    d = np.zeros(S)
    if outcome == 0:
        d[0] = 1.0
        d[S - 1] = 1.0
        d[1 : S - 1] = 1.0 - p_slice.T.ravel()
    else:
        present = 1 + np.arange(a_prime_t) * G + (outcome - 1)
        d[present] = p_slice[outcome - 1, :]
    return d


def build_primary_transition(r_star_next, s_ages, A_prime):
    """One-step transition matrix of the between-period chain.

    ``s_ages`` holds survival for primary ages ``1..A'-1``; the age-``A'``
    and "departed" rows are absorbing into "departed".
    """
    s_ages = np.asarray(s_ages, dtype=float)
    if s_ages.shape != (A_prime - 1,):
        raise ConstraintError("s_ages must have one entry per age 1..A'-1")
    S = A_prime + 2
    M = np.zeros((S, S))
    M[0, 0] = 1.0 - r_star_next
    M[0, 1] = r_star_next
    for age in range(1, A_prime):
        M[age, age + 1] = s_ages[age - 1]
        M[age, S - 1] = 1.0 - s_ages[age - 1]
    M[A_prime, S - 1] = 1.0
    M[S - 1, S - 1] = 1.0
    return M


def secondary_matrices(params, t):
    """(pi, trans, log_obs) of the within-period chain for period ``t``.

    Vectorised over occasions; cell-for-cell identical to stacking the
    per-occasion ``build_*`` constructions.
    """
    d = params.design
    i = t - 1
    K, G, ap = d.K[i], d.G, d.a_prime[i]
    alpha, Psi, phi, cap = params.alpha[i], params.Psi[i], params.phi[i], params.p[i]
    beta_t = params.beta[i]
    beta_star = conditional_arrival(beta_t)
    pi = build_secondary_initial(beta_t[0], alpha, ap)
    S = ap * G + 2
    trans = np.zeros((K - 1, S, S))
    if K > 1:
        trans[:, 0, 0] = 1.0 - beta_star[1:]
        trans[:, 0, 1 : G + 1] = beta_star[1:, None] * alpha[None, :]
        for a in range(1, ap):
            rows = slice(1 + (a - 1) * G, 1 + a * G)
            cols = slice(1 + a * G, 1 + (a + 1) * G)
            trans[:, rows, cols] = phi[a - 1][:, None, None] * Psi[None, :, :]
            trans[:, rows, S - 1] = (1.0 - phi[a - 1])[:, None]
        trans[:, 1 + (ap - 1) * G : 1 + ap * G, S - 1] = 1.0
        trans[:, S - 1, S - 1] = 1.0
    obs = np.zeros((K, G + 1, S))
    obs[:, 0, 0] = 1.0
    obs[:, 0, S - 1] = 1.0
    # cap has axes (state, age, occasion); present states are age-major
    present = 1.0 - np.swapaxes(cap, 0, 2).reshape(K, ap * G)
    obs[:, 0, 1 : S - 1] = present
    ages = np.arange(ap)
    for g in range(1, G + 1):
        obs[:, g, 1 + ages * G + (g - 1)] = cap[g - 1, :, :].T
    with np.errstate(divide="ignore"):
        log_obs = np.log(obs)
    return pi, trans, log_obs


def secondary_loglik_slices(params, t, slices, kernel=None):
    """Log within-period likelihood of each row of ``slices`` for period ``t``."""
    pi, trans, log_obs = secondary_matrices(params, t)
    return forward_loglik(pi, trans, log_obs, slices, kernel=kernel)


def secondary_likelihood(history_slice, params, t):
    """Within-period likelihood of one period-``t`` outcome slice.

    The all-zero slice yields the never-seen-this-period value ``L0(t)``.
    """
    codes = np.asarray(history_slice, dtype=np.int64).reshape(1, -1)
    if codes.shape[1] != params.design.K[t - 1]:
        raise ConstraintError(f"slice must have length K({t})")
    return float(np.exp(secondary_loglik_slices(params, t, codes)[0]))


def _primary_emission_logdiag(sec_loglik, is_zero_slice, A_prime):
    """Log emission diagonal of the between-period chain for one period slice."""
    S = A_prime + 2
    d = np.full(S, sec_loglik)
    boundary = 0.0 if is_zero_slice else -np.inf
    d[0] = boundary
    d[S - 1] = boundary
    return d


def _dataset_codes(dataset):
    """Per-period unique slices and history codes, cached on the dataset.

    For every period the unique outcome slices are found once (the all-zero
    slice is appended when absent, its within-period value doubles as
    ``L0(t)``); each history is reduced to a vector of per-period slice
    indices.  Likelihood evaluations at different parameter values reuse the
    codes.
    """
    cache = dataset._cache
    if "codes" not in cache:
        d = dataset.design
        uniques, codes, zero_idx = [], [], []
        for t in range(1, d.T + 1):
            block = dataset.period_block(t)
            uniq, inv = np.unique(block, axis=0, return_inverse=True)
            if uniq.size == 0:
                uniq = np.zeros((0, d.K[t - 1]), dtype=np.int64)
            zrows = np.flatnonzero(~uniq.any(axis=1))
            if zrows.size:
                zi = int(zrows[0])
            else:
                uniq = np.vstack([uniq, np.zeros((1, d.K[t - 1]), dtype=np.int64)])
                zi = uniq.shape[0] - 1
            uniques.append(np.ascontiguousarray(uniq))
            codes.append(inv.astype(np.int64).reshape(-1))
            zero_idx.append(zi)
        cache["codes"] = (uniques, codes, zero_idx)
    return cache["codes"]


def primary_chain(params):
    """(pi, trans) of the between-period chain."""
    d = params.design
    S = d.A_prime + 2
    r_star = conditional_recruitment(params.r)
    pi = np.zeros(S)
    pi[0] = 1.0 - params.r[0]
    pi[1] = params.r[0]
    trans = np.empty((d.T - 1, S, S))
    for t in range(1, d.T):
        trans[t - 1] = build_primary_transition(r_star[t], params.s[:, t - 1], d.A_prime)
    return pi, trans


def history_logliks(dataset, params, kernel=None):
    """Log-likelihood of every unique history plus the never-captured value.

    Returns ``(loglik_j, loglik_0)`` where ``loglik_j`` aligns with the
    dataset's history rows.
    """
    d = dataset.design
    uniques, codes, zero_idx = _dataset_codes(dataset)
    J = dataset.J
    A = d.A_prime
    max_m = max(u.shape[0] for u in uniques)
    log_obs = np.full((d.T, max_m, A + 2), -np.inf)
    for t in range(1, d.T + 1):
        sec = secondary_loglik_slices(params, t, uniques[t - 1], kernel=kernel)
        m = sec.size
        log_obs[t - 1, :m, 1 : A + 1] = sec[:, None]
        log_obs[t - 1, :m, 0] = -np.inf
        log_obs[t - 1, zero_idx[t - 1], 0] = 0.0
        log_obs[t - 1, :m, A + 1] = log_obs[t - 1, :m, 0]
    pi, trans = primary_chain(params)
    primary_codes = np.empty((J + 1, d.T), dtype=np.int64)
    for t in range(d.T):
        primary_codes[:J, t] = codes[t]
        primary_codes[J, t] = zero_idx[t]
    ll = forward_loglik(pi, trans, log_obs, primary_codes, kernel=kernel)
    return ll[:J], float(ll[J])


def primary_likelihood(history, params, kernel=None):
    """Likelihood of one full capture history (the all-zero history gives L0)."""
    d = params.design
    history = np.asarray(history, dtype=np.int64).reshape(-1)
    if history.size != d.total_occasions:
        raise ConstraintError(f"history must have {d.total_occasions} entries")
    A = d.A_prime
    log_obs = np.full((d.T, 1, A + 2), -np.inf)
    for t in range(1, d.T + 1):
        slc = history[d.period_columns(t)].reshape(1, -1)
        sec = secondary_loglik_slices(params, t, slc, kernel=kernel)[0]
        log_obs[t - 1, 0] = _primary_emission_logdiag(sec, not slc.any(), A)
    pi, trans = primary_chain(params)
    ll = forward_loglik(pi, trans, log_obs, np.zeros((1, d.T), dtype=np.int64), kernel=kernel)
    return float(np.exp(ll[0]))


def log_likelihood(dataset, params, kernel=None):
    """Exact multinomial log-likelihood of a dataset.

    Combines the per-history values with the super-population multinomial
    coefficient (log-gamma form).  Returns ``-inf`` when any observed history
    has zero probability, or when a missed individual is impossible
    (``L0 = 0`` with ``N > n``).
    """
    N = params.N
    n = dataset.n
    if N < n:
        raise ConstraintError(f"N={N} is smaller than the number of observed individuals n={n}")
    ll_j, ll_0 = history_logliks(dataset, params, kernel=kernel)
    if np.any(np.isneginf(ll_j)):
        return -np.inf
    out = gammaln(N + 1.0) - gammaln(N - n + 1.0) - float(gammaln(dataset.counts + 1.0).sum())
    out += float(dataset.counts @ ll_j)
    if N > n:
        if np.isneginf(ll_0):
            return -np.inf
        out += (N - n) * ll_0
    if not np.isfinite(out):
        return -np.inf
    return float(out)
