"""Kernel selection and the log-space wrapper around the forward recursion.

The hot loop of every likelihood evaluation is a scaled forward pass over a
batch of observation sequences.  Two interchangeable implementations exist:
a Cython extension (``stopover._forward``) and a pure-numpy fallback
(``stopover._forward_py``).  The compiled kernel is used when importable;
set ``STOPOVER_KERNEL=python`` or ``STOPOVER_KERNEL=cython`` to force one.
``benchmarks/forward_bench.py`` compares the two.
"""

import os

import numpy as np

from . import _forward_py

_IMPLS = {"python": _forward_py.forward_kernel}

try:
    from . import _forward as _forward_cy

    _IMPLS["cython"] = _forward_cy.forward_kernel
except ImportError:
    _forward_cy = None

_requested = os.environ.get("STOPOVER_KERNEL", "").strip().lower()
if _requested:
    if _requested not in _IMPLS:
        raise ImportError(
            f"STOPOVER_KERNEL={_requested!r} is not available; "
            f"choices: {sorted(_IMPLS)}"
        )
    ACTIVE_KERNEL = _requested
else:
    ACTIVE_KERNEL = "cython" if "cython" in _IMPLS else "python"


def available_kernels():
    """Mapping of kernel name to raw kernel callable."""
    return dict(_IMPLS)


def prepare_emissions(log_obs):
    """Split log emission diagonals into per-code offsets and rescaled factors.

    ``log_obs[k, c, :]`` is the log of the emission diagonal for outcome code
    ``c`` at step ``k``; entries of ``-inf`` mark impossible (state, outcome)
    pairs.  Returns ``(expobs, moff)`` with
    ``expobs[k, c] = exp(log_obs[k, c] - moff[k, c])`` and ``moff`` the
    largest finite entry (0 where none exists), so emissions near the
    underflow limit stay representable.
    """
    log_obs = np.asarray(log_obs, dtype=float)
    finite = np.isfinite(log_obs)
    moff = np.where(finite.any(axis=2), np.max(np.where(finite, log_obs, -np.inf), axis=2), 0.0)
    expobs = np.exp(np.where(finite, log_obs - moff[:, :, None], -np.inf))
    return np.ascontiguousarray(expobs), np.ascontiguousarray(moff)


def forward_loglik(pi, trans, log_obs, codes, kernel=None):
    """Batched scaled-forward log-likelihoods.

    Parameters
    ----------
    pi : (S,) initial distribution.
    trans : (K-1, S, S) step transition matrices.
    log_obs : (K, M, S) log emission diagonals per outcome code.
    codes : (J, K) outcome codes per sequence.
    kernel : optional kernel name overriding the active default.
    """
    pi = np.ascontiguousarray(pi, dtype=float)
    trans = np.ascontiguousarray(trans, dtype=float)
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    if codes.ndim != 2:
        codes = codes.reshape(1, -1)
    expobs, moff = prepare_emissions(log_obs)
    fn = _IMPLS[kernel or ACTIVE_KERNEL]
    return np.asarray(fn(pi, trans, expobs, moff, codes))
