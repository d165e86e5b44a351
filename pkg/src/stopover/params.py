"""Natural-scale model parameters and the probability maps built from them.

The parameter set follows the generative story: a super-population of size
``N`` recruits into the study across primary periods (``r``), survives
between periods by age (``s``), arrives within a period by occasion
(``beta``), picks an initial state (``alpha``), moves between states
(``Psi``), is retained occasion-to-occasion by within-period age (``phi``)
and is captured with state/age/occasion-specific probability (``p``).

Survival is stored for ages ``1..A'-1`` only: an individual that reaches the
maximum trackable age departs with certainty, so the age-``A'`` row of the
between-period chain is structurally absorbing.  Retention likewise stores
ages ``1..a'(t)-1``.  Entries of triangular tables that correspond to
unreachable (age, occasion) combinations are carried for shape regularity but
never enter the likelihood; :func:`params_allclose` compares only the
reachable entries.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .design import StudyDesign, _freeze
from .errors import ConstraintError

SIMPLEX_TOL = 1e-12

# Natural parameters at exactly 0 or 1 map to +/-inf on the link scale; the
# unconstrained representation clips there instead.
LOGIT_CLIP = 30.0


def logit(p):
    p = np.clip(p, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        return np.clip(np.log(p) - np.log1p(-p), -LOGIT_CLIP, LOGIT_CLIP)


def simplex_from_logits(theta, m):
    """Multinomial-logit inverse map with the last of ``m`` categories as reference."""
    if m == 1:
        return np.ones(1)
    z = np.concatenate([np.asarray(theta, dtype=float), [0.0]])
    z -= z.max()
    w = np.exp(z)
    return w / w.sum()


def logits_from_simplex(x):
    """Inverse of :func:`simplex_from_logits`; clipped for boundary entries."""
    x = np.asarray(x, dtype=float)
    if x.size <= 1:
        return np.zeros(0)
    with np.errstate(divide="ignore"):
        return np.clip(np.log(x[:-1]) - np.log(x[-1]), -LOGIT_CLIP, LOGIT_CLIP)


def _check_simplex(x, what):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ConstraintError(f"{what} must be a vector")
    if np.any(x < -SIMPLEX_TOL) or np.any(x > 1 + SIMPLEX_TOL):
        raise ConstraintError(f"{what} entries must lie in [0, 1]")
    if abs(x.sum() - 1.0) > 1e-9:
        raise ConstraintError(f"{what} must sum to 1, got {x.sum()!r}")
    return x


def conditional_recruitment(r):
    """Conditional recruitment probabilities ``r*``.

    ``r*(t)`` is the probability of recruiting in period ``t`` given no
    recruitment in ``1..t-1``, i.e. ``r(t)`` divided by the tail sum from
    ``t``.  When a tail sum vanishes the corresponding ``r*`` is defined as 0
    (the conditioning event is unreachable).
    """
    r = _check_simplex(r, "recruitment vector r")
    return _tail_conditional(r)


def conditional_arrival(beta_t):
    """Conditional arrival probabilities ``beta*`` for one period (see
    :func:`conditional_recruitment`; identical tail construction)."""
    beta_t = _check_simplex(beta_t, "arrival vector beta(t)")
    return _tail_conditional(beta_t)


def _tail_conditional(x):
    tails = np.cumsum(x[::-1])[::-1]
    out = np.zeros_like(x)
    nz = tails > 0
    out[nz] = x[nz] / tails[nz]
    return np.clip(out, 0.0, 1.0)


def simplex_from_conditional(c):
    """Stick-breaking reconstruction: inverse of the tail-conditional map."""
    c = np.asarray(c, dtype=float)
    stay = np.concatenate([[1.0], np.cumprod(1.0 - c[:-1])])
    return c * stay


def arrival_from_logistic(eta_t, delta, K_t):
    """Arrival simplex from a logistic regression on occasion number.

    Weights ``w(k) = expit(eta_t * k + delta)`` for ``k = 1..K_t`` are
    normalised to sum to one.  If every weight underflows to zero the uniform
    simplex is returned.
    """
    k = np.arange(1, K_t + 1, dtype=float)
    w = expit(eta_t * k + delta)
    total = w.sum()
    if total <= 0.0:
        return np.full(K_t, 1.0 / K_t)
    return w / total


def retention_from_logistic(tau, gamma, a_prime_t):
    """Retention table from occasion effects plus a linear age term.

    ``phi[a-1, k-1] = expit(tau(k) + gamma * (a - 1))`` for ages
    ``1..a'(t)-1`` and occasions ``1..len(tau)``.
    """
    tau = np.asarray(tau, dtype=float)
    a = np.arange(a_prime_t - 1, dtype=float)[:, None]
    return expit(tau[None, :] + gamma * a)


@dataclass(frozen=True)
class ParameterSet:
    """Full natural-scale parameter set for a given :class:`StudyDesign`.

    Fields
    ------
    N : float
        Super-population size.
    r : (T,) array
        Recruitment simplex over primary periods.
    s : (A'-1, T-1) array
        Survival by primary age (rows, ages 1..A'-1) and period (columns).
    alpha : tuple of (G,) arrays
        Initial-state simplex per period; zero outside availability.
    Psi : tuple of (G, G) arrays
        Within-period state transition matrix per period; rows stochastic,
        columns zero outside availability.
    beta : tuple of (K(t),) arrays
        Arrival simplex per period.
    phi : tuple of (a'(t)-1, K(t)-1) arrays
        Retention by within-period age (rows) and occasion (columns).
    p : tuple of (G, a'(t), K(t)) arrays
        Capture probability by state, within-period age and occasion.
    """

    design: StudyDesign
    N: float
    r: np.ndarray
    s: np.ndarray
    alpha: tuple
    Psi: tuple
    beta: tuple
    phi: tuple
    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "N", float(self.N))
        object.__setattr__(self, "r", _freeze(np.asarray(self.r, dtype=float)))
        object.__setattr__(self, "s", _freeze(np.asarray(self.s, dtype=float).reshape(self.design.A_prime - 1, max(self.design.T - 1, 0))))
        for name in ("alpha", "Psi", "beta", "phi", "p"):
            arrays = tuple(_freeze(np.asarray(a, dtype=float)) for a in getattr(self, name))
            object.__setattr__(self, name, arrays)
        self._validate()

    def _validate(self):
        d = self.design
        if not np.isfinite(self.N) or self.N <= 0:
            raise ConstraintError("N must be a positive real")
        if self.r.shape != (d.T,):
            raise ConstraintError("r must have one entry per primary period")
        _check_simplex(self.r, "recruitment vector r")
        if np.any(self.s < 0) or np.any(self.s > 1):
            raise ConstraintError("survival probabilities must lie in [0, 1]")
        for group in ("alpha", "Psi", "beta", "phi", "p"):
            if len(getattr(self, group)) != d.T:
                raise ConstraintError(f"{group} must have one entry per primary period")
        for t in range(1, d.T + 1):
            avail = d.availability[t - 1]
            off = [g for g in range(1, d.G + 1) if g not in avail]
            a = self.alpha[t - 1]
            if a.shape != (d.G,):
                raise ConstraintError(f"alpha({t}) must have length G")
            _check_simplex(a, f"alpha({t})")
            if any(a[g - 1] != 0.0 for g in off):
                raise ConstraintError(f"alpha({t}) must be zero outside availability")
            psi = self.Psi[t - 1]
            if psi.shape != (d.G, d.G):
                raise ConstraintError(f"Psi({t}) must be G x G")
            if np.any(psi < -SIMPLEX_TOL):
                raise ConstraintError(f"Psi({t}) entries must be non-negative")
            if np.any(np.abs(psi.sum(axis=1) - 1.0) > 1e-9):
                raise ConstraintError(f"rows of Psi({t}) must sum to 1")
            if any(psi[:, g - 1].any() for g in off):
                raise ConstraintError(f"Psi({t}) must be zero on unavailable target states")
            b = self.beta[t - 1]
            if b.shape != (d.K[t - 1],):
                raise ConstraintError(f"beta({t}) must have length K(t)")
            _check_simplex(b, f"beta({t})")
            ph = self.phi[t - 1]
            if ph.shape != (d.a_prime[t - 1] - 1, d.K[t - 1] - 1):
                raise ConstraintError(f"phi({t}) must have shape (a'(t)-1, K(t)-1)")
            if ph.size and (ph.min() < 0 or ph.max() > 1):
                raise ConstraintError(f"phi({t}) entries must lie in [0, 1]")
            cap = self.p[t - 1]
            if cap.shape != (d.G, d.a_prime[t - 1], d.K[t - 1]):
                raise ConstraintError(f"p({t}) must have shape (G, a'(t), K(t))")
            if cap.size and (cap.min() < 0 or cap.max() > 1):
                raise ConstraintError(f"p({t}) entries must lie in [0, 1]")


def survival_probability(params, age, t):
    """Effective survival from period ``t`` at primary age ``age``; zero at ``A'``."""
    if age >= params.design.A_prime:
        return 0.0
    return float(params.s[age - 1, t - 1])


def retention_probability(params, t, age, k):
    """Effective retention after occasion ``k`` of period ``t`` at within-period
    age ``age``; zero at ``a'(t)``."""
    if age >= params.design.a_prime[t - 1]:
        return 0.0
    return float(params.phi[t - 1][age - 1, k - 1])


def params_allclose(a, b, rtol=0.0, atol=1e-10):
    """Compare two parameter sets on the entries the likelihood can reach.

    Unreachable triangle entries (primary age > elapsed periods, within-period
    age > occasion index) are ignored; they are shape padding, not parameters.
    """
    d = a.design
    if d != b.design:
        return False
    if not np.isclose(a.N, b.N, rtol=rtol, atol=atol):
        return False
    if not np.allclose(a.r, b.r, rtol=rtol, atol=atol):
        return False
    for age in range(1, d.A_prime):
        for t in range(1, d.T):
            if age <= t and not np.isclose(a.s[age - 1, t - 1], b.s[age - 1, t - 1], rtol=rtol, atol=atol):
                return False
    for t in range(1, d.T + 1):
        i = t - 1
        if not (
            np.allclose(a.alpha[i], b.alpha[i], rtol=rtol, atol=atol)
            and np.allclose(a.Psi[i], b.Psi[i], rtol=rtol, atol=atol)
            and np.allclose(a.beta[i], b.beta[i], rtol=rtol, atol=atol)
        ):
            return False
        for k in range(1, d.K[i]):
            ages = min(k, d.a_prime[i] - 1)
            if ages and not np.allclose(a.phi[i][:ages, k - 1], b.phi[i][:ages, k - 1], rtol=rtol, atol=atol):
                return False
        avail = [g - 1 for g in d.availability[i]]
        for k in range(1, d.K[i] + 1):
            ages = min(k, d.a_prime[i])
            pa = a.p[i][avail, :ages, k - 1]
            pb = b.p[i][avail, :ages, k - 1]
            if not np.allclose(pa, pb, rtol=rtol, atol=atol):
                return False
    return True


def params_to_dict(params):
    """Plain-python (JSON-ready) rendering of a parameter set."""
    return {
        "N": params.N,
        "r": params.r.tolist(),
        "s": params.s.tolist(),
        "alpha": [a.tolist() for a in params.alpha],
        "psi": [m.tolist() for m in params.Psi],
        "beta": [b.tolist() for b in params.beta],
        "phi": [f.tolist() for f in params.phi],
        "p": [c.tolist() for c in params.p],
    }


def params_from_dict(design, data):
    """Inverse of :func:`params_to_dict` for a known design."""
    try:
        return ParameterSet(
            design=design,
            N=data["N"],
            r=data["r"],
            s=data["s"],
            alpha=tuple(np.asarray(a, dtype=float) for a in data["alpha"]),
            Psi=tuple(np.asarray(m, dtype=float) for m in data["psi"]),
            beta=tuple(np.asarray(b, dtype=float) for b in data["beta"]),
            phi=tuple(np.asarray(f, dtype=float) for f in data["phi"]),
            p=tuple(np.asarray(c, dtype=float) for c in data["p"]),
        )
    except KeyError as exc:
        raise ConstraintError(f"parameter dictionary is missing key {exc}") from exc
