"""Pure-numpy scaled forward recursion, the fallback kernel.

Same contract as the compiled extension in ``_forward.pyx``: likelihoods of a
batch of observation sequences under a shared hidden chain, computed with
per-step renormalisation so the result survives arbitrarily long sequences.
"""

import numpy as np


def forward_kernel(pi, trans, expobs, moff, codes):
    """Log-likelihood of each coded sequence under the chain ``(pi, trans)``.

    Parameters
    ----------
    pi : (S,) array
        Initial hidden-state distribution.
    trans : (K-1, S, S) array
        Transition matrix applied between steps ``k`` and ``k+1``.
    expobs : (K, M, S) array
        Rescaled emission diagonals: ``expobs[k, c] = exp(logdiag - moff[k, c])``
        for outcome code ``c`` at step ``k``.
    moff : (K, M) array
        Per-(step, code) log offsets removed from the emission diagonals.
    codes : (J, K) integer array
        Outcome code of each sequence at each step.

    Returns
    -------
    (J,) array of log-likelihoods, ``-inf`` where the probability is zero.
    """
    codes = np.asarray(codes, dtype=np.int64)
    J, K = codes.shape
    if J == 0:
        return np.zeros(0)
    c = codes[:, 0]
    v = pi[None, :] * expobs[0, c]
    acc = moff[0, c].copy()
    tot = v.sum(axis=1)
    alive = tot > 0
    safe = np.where(alive, tot, 1.0)
    v /= safe[:, None]
    with np.errstate(divide="ignore"):
        acc += np.where(alive, np.log(safe), -np.inf)
    for k in range(1, K):
        v = v @ trans[k - 1]
        c = codes[:, k]
        v *= expobs[k, c]
        tot = v.sum(axis=1)
        alive &= tot > 0
        safe = np.where(alive, tot, 1.0)
        v /= safe[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            acc += np.where(alive, np.log(safe) + moff[k, c], -np.inf)
    return np.where(alive, acc, -np.inf)
