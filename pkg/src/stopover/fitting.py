"""Maximum-likelihood fitting, derived abundances, bootstrap and AIC search.

The objective is the exact multinomial log-likelihood on the unconstrained
scale.  The primary optimizer is quasi-Newton (BFGS with finite-difference
gradients) with an optional Nelder-Mead polish when the quasi-Newton path
reports trouble; multiple jittered starts guard against local optima.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .design import single_period_dataset
from .errors import StructureError
from .hmm import log_likelihood
from .params import survival_probability
from .structure import (
    ModelStructure,
    _classify,
    _p_cells,
    _p_key,
    _p_name,
    _s_cells,
    _s_key,
    _s_name,
    apply_move,
)

BAD_OBJECTIVE = 1e15

# Unconstrained estimates beyond this are treated as boundary estimates
# (probability pinned at 0/1 or N pinned at n) rather than interior optima.
BOUNDARY_THRESHOLD = 15.0


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "BFGS"
    starts: int = 10
    jitter: float = 0.5
    seed: int = 0
    gtol: float = 1e-5
    # finite-difference gradients bottom out above gtol near the optimum;
    # a stationary point within this softer norm still counts as converged
    soft_gtol: float = 2e-3
    maxiter: int = 500
    polish: bool = True


@dataclass(frozen=True)
class FitResult:
    structure: ModelStructure
    theta: np.ndarray
    params: object
    loglik: float
    aic: float
    converged: bool
    n_params: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def boundary_params(self):
        return self.diagnostics.get("boundary_params", [])


def _objective(dataset, structure):
    design = dataset.design
    n = dataset.n

    def fun(theta):
        params = structure.expand(theta, design, n)
        ll = log_likelihood(dataset, params)
        if not np.isfinite(ll):
            return BAD_OBJECTIVE
        return -ll

    return fun


def fit(dataset, structure, init=None, config=None):
    """Maximise the likelihood of ``dataset`` under ``structure``.

    ``init`` is an unconstrained start vector (defaults to zeros, i.e. all
    probabilities 1/2, uniform simplexes, N = n + 1); further starts jitter
    it with seeded normal noise.  Returns the best optimum found; when no
    start converges the result is flagged rather than discarded.
    """
    config = config or OptimizerConfig()
    design = dataset.design
    dim = structure.dimension(design)
    if init is None:
        x0 = np.zeros(dim)
    else:
        x0 = np.asarray(init, dtype=float).reshape(-1)
        if x0.size != dim:
            raise StructureError(f"init has length {x0.size}, structure needs {dim}")
    fun = _objective(dataset, structure)
    rng = np.random.default_rng(config.seed)
    starts = [x0] + [x0 + config.jitter * rng.standard_normal(dim) for _ in range(config.starts - 1)]

    candidates = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for start in starts:
            res = optimize.minimize(
                fun,
                start,
                method=config.method,
                options={"gtol": config.gtol, "maxiter": config.maxiter}
                if config.method in ("BFGS", "L-BFGS-B")
                else {"maxiter": config.maxiter},
            )
            ok = bool(res.success)
            if not ok and getattr(res, "jac", None) is not None:
                ok = bool(np.max(np.abs(res.jac)) < config.soft_gtol)
            if not ok and config.polish:
                res2 = optimize.minimize(
                    fun,
                    res.x,
                    method="Nelder-Mead",
                    options={"maxiter": min(100 * dim, 2000), "fatol": 1e-6, "xatol": 1e-4},
                )
                if res2.fun <= res.fun:
                    ok = bool(res2.success)
                    res = res2
            candidates.append((res, ok))

    res, _ = min(candidates, key=lambda c: c[0].fun)
    # a failed run that lands within noise of a cleanly converged one is the
    # same optimum, not a convergence failure
    ok = any(c_ok and c.fun <= res.fun + 1e-4 for c, c_ok in candidates)
    n_converged = sum(c_ok for _, c_ok in candidates)
    theta = np.asarray(res.x, dtype=float)
    params = structure.expand(theta, design, dataset.n)
    loglik = log_likelihood(dataset, params)
    grad_norm = float(np.max(np.abs(res.jac))) if getattr(res, "jac", None) is not None else None
    boundary = [name for name, v in zip(structure.param_names(design), theta) if abs(v) > BOUNDARY_THRESHOLD]
    diagnostics = {
        "iterations": int(res.nit) if hasattr(res, "nit") else None,
        "grad_norm": grad_norm,
        "message": str(res.message),
        "method": config.method,
        "starts": config.starts,
        "starts_converged": int(n_converged),
        "boundary_params": boundary,
    }
    return FitResult(
        structure=structure,
        theta=theta,
        params=params,
        loglik=float(loglik),
        aic=-2.0 * float(loglik) + 2.0 * dim,
        converged=ok,
        n_params=dim,
        diagnostics=diagnostics,
    )


def derived_abundance(obj):
    """Per-period abundances from the super-population, recruitment and survival.

    ``N(t) = N * sum_(b<=t) r(b) * prod_(u=b..t-1) s_(u-b+1)(u)`` with the
    empty product equal to one; accepts a fit result or a parameter set.
    """
    params = obj.params if isinstance(obj, FitResult) else obj
    design = params.design
    out = np.zeros(design.T)
    for t in range(1, design.T + 1):
        total = 0.0
        for b in range(1, t + 1):
            w = params.r[b - 1]
            for u in range(b, t):
                w *= survival_probability(params, u - b + 1, u)
            total += w
        out[t - 1] = params.N * total
    return out


# -- tidy reporting -----------------------------------------------------------

def report_rows(fit_result):
    """Plot-ready rows (parameter, year, occasion, state, age, estimate).

    Emits the natural-scale series a reader would chart: per-period derived
    abundance, recruitment, arrival simplexes, state entries, plus one row
    per free capture/survival/retention class and regression coefficient.
    """
    structure, params = fit_result.structure, fit_result.params
    design = params.design
    rows = [_row("N", value=params.N)]
    for t, value in enumerate(derived_abundance(params), start=1):
        rows.append(_row("N(t)", year=t, value=value))
    for t in range(1, design.T + 1):
        rows.append(_row("r", year=t, value=float(params.r[t - 1])))
    s_key = _s_key(structure.s.deps)
    s_classes, _ = _classify(_s_cells(design), s_key)
    for key in s_classes:
        A, t = key
        cell = next(c for c in _s_cells(design) if s_key(c) == key)
        rows.append(_row(_s_name(key), year=t, age=A, value=float(params.s[cell[0] - 1, cell[1] - 1])))
    for t in range(1, design.T + 1):
        for g in design.availability[t - 1]:
            rows.append(_row("alpha", year=t, state=g, value=float(params.alpha[t - 1][g - 1])))
    for t in range(1, design.T + 1):
        mask = design.availability[t - 1]
        if len(mask) > 1:
            for i in mask:
                for j in mask:
                    rows.append(_row(f"psi[{i}->{j}]", year=t, value=float(params.Psi[t - 1][i - 1, j - 1])))
    for t in range(1, design.T + 1):
        for k in range(1, design.K[t - 1] + 1):
            rows.append(_row("beta", year=t, occasion=k, value=float(params.beta[t - 1][k - 1])))
    for t in range(1, design.T + 1):
        for k in range(1, design.K[t - 1]):
            if design.a_prime[t - 1] > 1:
                rows.append(_row("phi", year=t, occasion=k, age=1, value=float(params.phi[t - 1][0, k - 1])))
    p_key = _p_key(structure.p.deps)
    p_classes, _ = _classify(_p_cells(design), p_key)
    for key in p_classes:
        t, k, g, a = key
        cell = next(c for c in _p_cells(design) if p_key(c) == key)
        rows.append(
            _row(
                _p_name(key),
                year=t,
                occasion=k,
                state=g,
                age=a,
                value=float(params.p[cell[0] - 1][cell[2] - 1, cell[3] - 1, cell[1] - 1]),
            )
        )
    return rows


def _row(name, year=None, occasion=None, state=None, age=None, value=None):
    return {
        "parameter": name,
        "year": year,
        "occasion": occasion,
        "state": state,
        "age": age,
        "estimate": value,
    }


# -- bootstrap ----------------------------------------------------------------

@dataclass(frozen=True)
class BootstrapResult:
    B: int
    n_failed: int
    rows: list
    estimates: np.ndarray
    se: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    replicate_converged: np.ndarray
    base_fit: FitResult


def bootstrap(dataset, structure, B, seed, config=None, base_fit=None):
    """Nonparametric bootstrap: resample individual histories, refit, summarise.

    Replicates draw ``n`` histories with replacement (multiplicities
    expanded), are refit from the base MLE (single start), and record the
    report-row estimates.  Standard errors are empirical standard deviations
    and intervals the 2.5%/97.5% percentiles over converged replicates;
    failed replicates are counted, never silently dropped.  Replicate seeds
    derive from ``seed`` so runs are reproducible.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    config = config or OptimizerConfig()
    if base_fit is None:
        base_fit = fit(dataset, structure, config=config)
    rows = report_rows(base_fit)
    expanded = dataset.expanded()
    n = expanded.shape[0]
    replicate_config = replace(config, starts=1)
    estimates = np.full((B, len(rows)), np.nan)
    converged = np.zeros(B, dtype=bool)
    children = np.random.SeedSequence(seed).spawn(B)
    from .design import dataset_from_rows

    for b in range(B):
        rng = np.random.default_rng(children[b])
        idx = rng.integers(0, n, size=n)
        resampled = dataset_from_rows(dataset.design, expanded[idx])
        rep = fit(resampled, structure, init=base_fit.theta, config=replicate_config)
        converged[b] = rep.converged
        if rep.converged:
            estimates[b] = [row["estimate"] for row in report_rows(rep)]

    good = estimates[converged]
    if good.shape[0] >= 2:
        se = good.std(axis=0, ddof=1)
        ci_low = np.percentile(good, 2.5, axis=0)
        ci_high = np.percentile(good, 97.5, axis=0)
    else:
        se = np.full(len(rows), np.nan)
        ci_low = np.full(len(rows), np.nan)
        ci_high = np.full(len(rows), np.nan)
    return BootstrapResult(
        B=B,
        n_failed=int(B - converged.sum()),
        rows=rows,
        estimates=estimates,
        se=se,
        ci_low=ci_low,
        ci_high=ci_high,
        replicate_converged=converged,
        base_fit=base_fit,
    )


# -- step-up AIC search ---------------------------------------------------------

@dataclass(frozen=True)
class SelectionResult:
    best_structure: ModelStructure
    best_fit: FitResult
    trace: list


def step_up_selection(dataset, candidate_moves, base, config=None):
    """Greedy forward AIC search over single-dependency additions.

    Each move is a grammar fragment (``"s=year"``); every round fits the
    incumbent structure with each remaining move applied, accepts the move
    with the lowest AIC if it improves on the incumbent, and stops otherwise.
    Candidates that fail to converge, or whose log-likelihood falls below the
    incumbent's (impossible for a correctly maximised nested model), are
    flagged in the trace and never accepted.
    """
    config = config or OptimizerConfig()
    current = fit(dataset, base, config=config)
    trace = [_trace_entry(0, None, current, accepted=True, note="base")]
    remaining = list(candidate_moves)
    rnd = 0
    while remaining:
        rnd += 1
        candidates = []
        for move in remaining:
            candidate_structure = apply_move(current.structure, move)
            if candidate_structure == current.structure:
                trace.append(_trace_entry(rnd, move, None, accepted=False, note="no-op"))
                continue
            cand = fit(dataset, candidate_structure, config=config)
            note = ""
            usable = cand.converged
            if cand.loglik < current.loglik - 1e-4:
                usable = False
                note = "loglik below incumbent; treated as non-converged"
            elif not cand.converged:
                note = "did not converge"
            entry = _trace_entry(rnd, move, cand, accepted=False, note=note)
            trace.append(entry)
            candidates.append((move, cand, usable, entry))
        usable = [(move, cand, entry) for move, cand, ok, entry in candidates if ok]
        if not usable:
            break
        move, best_cand, entry = min(usable, key=lambda mc: mc[1].aic)
        if best_cand.aic < current.aic:
            current = best_cand
            remaining.remove(move)
            entry["accepted"] = True
        else:
            break
    return SelectionResult(best_structure=current.structure, best_fit=current, trace=trace)


def _trace_entry(rnd, move, fit_result, accepted, note=""):
    entry = {
        "round": rnd,
        "move": move,
        "accepted": accepted,
        "note": note,
    }
    if fit_result is not None:
        entry.update(
            structure=fit_result.structure.to_text(),
            loglik=fit_result.loglik,
            aic=fit_result.aic,
            n_params=fit_result.n_params,
            converged=fit_result.converged,
        )
    return entry


def fit_single_periods(dataset, structure_for_period, config=None):
    """Fit an independent one-period model to each primary period's data.

    ``structure_for_period`` maps a period's design to a structure (or is a
    fixed structure reused for every period).  Returns one fit per period.
    """
    fits = []
    for t in range(1, dataset.design.T + 1):
        sub = single_period_dataset(dataset, t)
        st = structure_for_period(sub.design) if callable(structure_for_period) else structure_for_period
        fits.append(fit(sub, st, config=config))
    return fits
