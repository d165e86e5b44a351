"""Dependency grammar mapping an unconstrained parameter vector to a
:class:`~stopover.params.ParameterSet`.

A :class:`ModelStructure` declares, per parameter family, which indices share
a value.  Table families (``s``, ``phi``, ``p``) list dependence dimensions
drawn from ``year`` (primary period), ``occ`` (occasion), ``state`` and
``age``; simplex families (``r``, ``alpha``, ``psi``) are either ``const``
(shared) or ``year``; arrival and retention additionally support logistic
regressions on occasion number with optional per-year coefficients and (for
retention) a linear age term.

Text form, e.g.::

    r=year;s=const;alpha=const;psi=const;
    beta=logistic(intercept=shared,slope=year);
    phi=logistic(occeff=shared,age=shared);p=state

Unconstrained scale: probabilities through the logit link, simplexes through
a multinomial logit with the last (available) category as reference, and the
super-population through ``N = n + exp(theta_N)``.  Values shared across
periods with different availability are grouped by availability mask, and
states that a period cannot observe receive structural zeros.

Structures and designs are immutable, so the index bookkeeping (which theta
entry feeds which table cell) is computed once per (structure, design) pair
and cached.
"""

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit

from .errors import StructureError
from .params import (
    LOGIT_CLIP,
    ParameterSet,
    logit,
    logits_from_simplex,
    simplex_from_logits,
)

_TABLE_DEPS = ("year", "occ", "state", "age")
_LOGISTIC_TERMS = ("intercept", "slope", "occeff", "age")
_MODES = ("shared", "year")

# Fill value for table cells no reachable index maps to (shape padding only).
_PAD = 0.5


@dataclass(frozen=True)
class TableSpec:
    """One probability per equivalence class of the listed dependencies."""

    deps: tuple = ()

    def __post_init__(self):
        deps = tuple(d for d in _TABLE_DEPS if d in self.deps)
        if set(self.deps) - set(_TABLE_DEPS):
            raise StructureError(f"unknown table dependencies {set(self.deps) - set(_TABLE_DEPS)}")
        object.__setattr__(self, "deps", deps)

    def text(self):
        return "*".join(self.deps) if self.deps else "const"


@dataclass(frozen=True)
class LogisticSpec:
    """Logit-linear predictor built from (term, mode) pairs.

    Terms: ``intercept``; ``slope`` (linear in occasion number); ``occeff``
    (one effect per occasion, subsumes intercept and slope); ``age`` (linear
    in within-period age minus one).  Modes: ``shared`` across years or
    ``year``.
    """

    terms: tuple

    def __post_init__(self):
        seen = {}
        for term, mode in self.terms:
            if term not in _LOGISTIC_TERMS:
                raise StructureError(f"unknown logistic term {term!r}")
            if mode not in _MODES:
                raise StructureError(f"unknown mode {mode!r} for term {term!r}")
            if term in seen:
                raise StructureError(f"duplicate logistic term {term!r}")
            seen[term] = mode
        if not seen:
            raise StructureError("logistic spec needs at least one term")
        if "occeff" in seen and ("intercept" in seen or "slope" in seen):
            raise StructureError("occeff already spans intercept and slope effects")
        object.__setattr__(self, "terms", tuple((t, seen[t]) for t in _LOGISTIC_TERMS if t in seen))

    def mode(self, term):
        for t, m in self.terms:
            if t == term:
                return m
        return None

    def text(self):
        return "logistic(" + ",".join(f"{t}={m}" for t, m in self.terms) + ")"


@dataclass(frozen=True)
class ModelStructure:
    r: str = "const"
    s: TableSpec = TableSpec()
    alpha: str = "const"
    psi: str = "const"
    beta: object = LogisticSpec((("intercept", "shared"), ("slope", "shared")))
    phi: object = LogisticSpec((("intercept", "shared"), ("slope", "shared")))
    p: TableSpec = TableSpec()

    def __post_init__(self):
        for field in ("r", "alpha", "psi"):
            if getattr(self, field) not in ("const", "year"):
                raise StructureError(f"{field} must be 'const' or 'year'")
        if set(self.s.deps) - {"year", "age"}:
            raise StructureError("s supports only year and age dependence")
        if isinstance(self.beta, LogisticSpec):
            if self.beta.mode("occeff") or self.beta.mode("age"):
                raise StructureError("arrival regressions support intercept and slope terms only")
        elif self.beta != "free":
            raise StructureError("beta must be 'free' or a logistic spec")
        if isinstance(self.phi, TableSpec):
            if set(self.phi.deps) - {"year", "occ", "age"}:
                raise StructureError("phi supports year, occ and age dependence")
        elif not isinstance(self.phi, LogisticSpec):
            raise StructureError("phi must be a table or logistic spec")

    def to_text(self):
        beta = self.beta.text() if isinstance(self.beta, LogisticSpec) else self.beta
        return ";".join(
            [
                f"r={self.r}",
                f"s={self.s.text()}",
                f"alpha={self.alpha}",
                f"psi={self.psi}",
                f"beta={beta}",
                f"phi={self.phi.text()}",
                f"p={self.p.text()}",
            ]
        )

    def dimension(self, design):
        return _layout(self, design).dim

    def param_names(self, design):
        return list(_layout(self, design).names)

    def expand(self, theta, design, n_observed):
        """Map an unconstrained vector to a valid parameter set."""
        lay = _layout(self, design)
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != lay.dim:
            raise StructureError(f"theta has length {theta.size}, structure needs {lay.dim}")
        N = n_observed + np.exp(min(theta[0], 30.0))
        T = design.T

        if lay.r_slice:
            r = simplex_from_logits(theta[lay.r_slice], T)
        else:
            r = np.full(T, 1.0 / T)

        s = _table_values(theta, lay.s_slice, lay.s_index)
        alpha, psi = [], []
        for t in range(T):
            mask, a_slice, rows = lay.mask_slots[t]
            idx = [g - 1 for g in mask]
            m = len(mask)
            full = np.zeros(design.G)
            full[idx] = simplex_from_logits(theta[a_slice], m)
            alpha.append(full)
            mat = np.zeros((design.G, design.G))
            for row_slice, i in zip(rows, idx):
                mat[i, idx] = simplex_from_logits(theta[row_slice], m)
            for g in range(design.G):
                if g not in idx:
                    mat[g, idx] = 1.0 / m  # unreachable source state, kept stochastic
            psi.append(mat)

        beta = _expand_beta(self.beta, design, theta, lay)
        phi = _expand_phi(self.phi, design, theta, lay)
        p = [_table_values(theta, lay.p_slice, lay.p_index[t]) for t in range(T)]

        return ParameterSet(
            design=design, N=N, r=r, s=s,
            alpha=tuple(alpha), Psi=tuple(psi),
            beta=tuple(beta), phi=tuple(phi), p=tuple(p),
        )

    def extract(self, params, design, n_observed):
        """Unconstrained vector reproducing ``params`` (exactly when the set is
        representable under this structure; least squares otherwise)."""
        lay = _layout(self, design)
        theta = np.zeros(lay.dim)
        theta[0] = np.clip(
            np.log(max(params.N - n_observed, np.exp(-LOGIT_CLIP))), -LOGIT_CLIP, LOGIT_CLIP
        )
        if lay.r_slice:
            theta[lay.r_slice] = logits_from_simplex(params.r)
        _table_extract(theta, lay.s_slice, lay.s_index, params.s)
        for mask, periods, a_slice in lay.alpha_groups:
            idx = [g - 1 for g in mask]
            stack = [logits_from_simplex(params.alpha[t - 1][idx]) for t in periods]
            theta[a_slice] = np.mean(stack, axis=0)
        for mask, periods, rows in lay.psi_groups:
            idx = [g - 1 for g in mask]
            for row_slice, i in zip(rows, idx):
                stack = [logits_from_simplex(params.Psi[t - 1][i, idx]) for t in periods]
                theta[row_slice] = np.mean(stack, axis=0)
        _extract_beta(self.beta, params, design, theta, lay)
        _extract_phi(self.phi, params, design, theta, lay)
        sums = np.zeros(lay.p_slice.stop - lay.p_slice.start)
        counts = np.zeros_like(sums)
        for t in range(design.T):
            _table_accumulate(sums, counts, lay.p_index[t], params.p[t])
        with np.errstate(invalid="ignore"):
            theta[lay.p_slice] = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
        return theta


# -- cached layout -------------------------------------------------------------

class _Layout:
    """Index bookkeeping for one (structure, design) pair."""

    __slots__ = (
        "dim", "names", "r_slice", "s_slice", "s_index", "mask_slots",
        "alpha_groups", "psi_groups", "beta_slices", "phi_slices", "phi_index",
        "p_slice", "p_index",
    )


def _classify(cells, key):
    """Class keys in first-encounter order plus the per-cell class index."""
    order, known, idx = [], {}, []
    for cell in cells:
        k = key(cell)
        if k not in known:
            known[k] = len(order)
            order.append(k)
        idx.append(known[k])
    return order, idx


def _table_values(theta, slc, index):
    probs = np.concatenate([expit(theta[slc]), [_PAD]])
    return probs[index]


def _table_extract(theta, slc, index, values):
    size = slc.stop - slc.start
    sums = np.zeros(size)
    counts = np.zeros(size)
    _table_accumulate(sums, counts, index, values)
    theta[slc] = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)


def _table_accumulate(sums, counts, index, values):
    flat_idx = np.asarray(index).ravel()
    flat_val = logit(np.asarray(values, dtype=float)).ravel()
    used = flat_idx < sums.size
    np.add.at(sums, flat_idx[used], flat_val[used])
    np.add.at(counts, flat_idx[used], 1.0)


def _s_cells(design):
    for t in range(1, design.T):
        for A in range(1, min(t, design.A_prime - 1) + 1):
            yield (A, t)


def _phi_cells(design):
    for t in range(1, design.T + 1):
        for k in range(1, design.K[t - 1]):
            for a in range(1, min(k, design.a_prime[t - 1] - 1) + 1):
                yield (t, k, a)


def _p_cells(design):
    for t in range(1, design.T + 1):
        for k in range(1, design.K[t - 1] + 1):
            for g in design.availability[t - 1]:
                for a in range(1, min(k, design.a_prime[t - 1]) + 1):
                    yield (t, k, g, a)


def _s_key(deps):
    return lambda cell: (cell[0] if "age" in deps else None, cell[1] if "year" in deps else None)


def _phi_key(deps):
    return lambda cell: (
        cell[0] if "year" in deps else None,
        cell[1] if "occ" in deps else None,
        cell[2] if "age" in deps else None,
    )


def _p_key(deps):
    return lambda cell: (
        cell[0] if "year" in deps else None,
        cell[1] if "occ" in deps else None,
        cell[2] if "state" in deps else None,
        cell[3] if "age" in deps else None,
    )


def _tagged(prefix, pairs):
    inner = ",".join(f"{tag}={v}" for tag, v in pairs if v is not None)
    return f"{prefix}[{inner}]" if inner else prefix


def _s_name(key):
    return _tagged("s", (("A", key[0]), ("t", key[1])))


def _phi_name(key):
    return _tagged("phi", (("t", key[0]), ("k", key[1]), ("a", key[2])))


def _p_name(key):
    return _tagged("p", (("t", key[0]), ("k", key[1]), ("g", key[2]), ("a", key[3])))


def _mask_groups(design, mode):
    """(mask, periods) parameter groups for alpha/psi."""
    if mode == "year":
        return [
            (design.availability[t - 1], [t], f"[t={t}]")
            for t in range(1, design.T + 1)
        ]
    masks = []
    for t in range(1, design.T + 1):
        mask = design.availability[t - 1]
        if mask not in masks:
            masks.append(mask)
    multiple = len(masks) > 1
    out = []
    for mask in masks:
        label = "[states=" + "+".join(str(g) for g in mask) + "]" if multiple else ""
        periods = [t for t in range(1, design.T + 1) if design.availability[t - 1] == mask]
        out.append((mask, periods, label))
    return out


@lru_cache(maxsize=256)
def _layout(structure, design):
    lay = _Layout()
    names = ["N"]
    pos = 1

    def block(count):
        nonlocal pos
        slc = slice(pos, pos + count)
        pos += count
        return slc

    # recruitment
    if structure.r == "year":
        lay.r_slice = block(design.T - 1)
        names += [f"r[t={t}]" for t in range(1, design.T)]
    else:
        lay.r_slice = None

    # survival table: class index per cell of the (A'-1, T-1) rectangle,
    # padding cells point one past the class count
    key = _s_key(structure.s.deps)
    classes, _ = _classify(_s_cells(design), key)
    lay.s_slice = block(len(classes))
    names += [_s_name(k) for k in classes]
    lookup = {k: i for i, k in enumerate(classes)}
    lay.s_index = np.full((design.A_prime - 1, max(design.T - 1, 0)), len(classes), dtype=np.intp)
    for A in range(1, design.A_prime):
        for t in range(1, design.T):
            lay.s_index[A - 1, t - 1] = lookup.get(key((A, t)), len(classes))

    # initial state and transition simplexes, grouped by availability mask
    alpha_slot, psi_slot = {}, {}
    lay.alpha_groups = []
    for mask, periods, label in _mask_groups(design, structure.alpha):
        slc = block(len(mask) - 1)
        names += [f"alpha{label}[g={g}]" for g in mask[:-1]]
        lay.alpha_groups.append((mask, periods, slc))
        for t in periods:
            alpha_slot[t] = slc
    lay.psi_groups = []
    for mask, periods, label in _mask_groups(design, structure.psi):
        rows = []
        for i in mask:
            rows.append(block(len(mask) - 1))
            names += [f"psi{label}[{i}->{j}]" for j in mask[:-1]]
        lay.psi_groups.append((mask, periods, rows))
        for t in periods:
            psi_slot[t] = rows
    lay.mask_slots = [
        (design.availability[t - 1], alpha_slot[t], psi_slot[t]) for t in range(1, design.T + 1)
    ]

    # arrival
    if structure.beta == "free":
        lay.beta_slices = [block(K - 1) for K in design.K]
        for t in range(1, design.T + 1):
            names += [f"beta[t={t}][k={k}]" for k in range(1, design.K[t - 1])]
    else:
        lay.beta_slices = {}
        for term, mode in structure.beta.terms:
            if mode == "shared":
                lay.beta_slices[term] = block(1)
                names.append(f"beta.{term}")
            else:
                lay.beta_slices[term] = block(design.T)
                names += [f"beta.{term}[t={t}]" for t in range(1, design.T + 1)]

    # retention
    if isinstance(structure.phi, TableSpec):
        key = _phi_key(structure.phi.deps)
        classes, _ = _classify(_phi_cells(design), key)
        lay.phi_slices = block(len(classes))
        names += [_phi_name(k) for k in classes]
        lookup = {k: i for i, k in enumerate(classes)}
        lay.phi_index = []
        for t in range(1, design.T + 1):
            ap, K = design.a_prime[t - 1], design.K[t - 1]
            idx = np.full((ap - 1, K - 1), len(classes), dtype=np.intp)
            for a in range(1, ap):
                for k in range(1, K):
                    idx[a - 1, k - 1] = lookup.get(key((t, k, a)), len(classes))
            lay.phi_index.append(idx)
    else:
        lay.phi_index = None
        lay.phi_slices = {}
        max_occ = max((K - 1 for K in design.K), default=0)
        for term, mode in structure.phi.terms:
            if term == "occeff":
                if mode == "shared":
                    lay.phi_slices[term] = block(max_occ)
                    names += [f"phi.occeff[k={k}]" for k in range(1, max_occ + 1)]
                else:
                    slices = [block(K - 1) for K in design.K]
                    lay.phi_slices[term] = slices
                    for t in range(1, design.T + 1):
                        names += [f"phi.occeff[t={t}][k={k}]" for k in range(1, design.K[t - 1])]
            elif mode == "shared":
                lay.phi_slices[term] = block(1)
                names.append(f"phi.{term}")
            else:
                lay.phi_slices[term] = block(design.T)
                names += [f"phi.{term}[t={t}]" for t in range(1, design.T + 1)]

    # capture table
    key = _p_key(structure.p.deps)
    classes, _ = _classify(_p_cells(design), key)
    lay.p_slice = block(len(classes))
    names += [_p_name(k) for k in classes]
    lookup = {k: i for i, k in enumerate(classes)}
    lay.p_index = []
    for t in range(1, design.T + 1):
        ap, K = design.a_prime[t - 1], design.K[t - 1]
        idx = np.full((design.G, ap, K), len(classes), dtype=np.intp)
        for g in range(1, design.G + 1):
            for a in range(1, ap + 1):
                for k in range(1, K + 1):
                    idx[g - 1, a - 1, k - 1] = lookup.get(key((t, k, g, a)), len(classes))
        lay.p_index.append(idx)

    lay.dim = pos
    lay.names = tuple(names)
    return lay


# -- arrival and retention expansion -------------------------------------------

def _coef_by_period(slc, theta, T):
    vals = theta[slc]
    return np.repeat(vals, T) if vals.size == 1 else vals


def _expand_beta(spec, design, theta, lay):
    T = design.T
    if spec == "free":
        return [
            simplex_from_logits(theta[lay.beta_slices[t - 1]], design.K[t - 1])
            for t in range(1, T + 1)
        ]
    coefs = {term: _coef_by_period(slc, theta, T) for term, slc in lay.beta_slices.items()}
    out = []
    for t in range(1, T + 1):
        k = np.arange(1, design.K[t - 1] + 1, dtype=float)
        eta = np.zeros_like(k)
        if "intercept" in coefs:
            eta += coefs["intercept"][t - 1]
        if "slope" in coefs:
            eta += coefs["slope"][t - 1] * k
        w = expit(eta)
        total = w.sum()
        out.append(w / total if total > 0 else np.full(k.size, 1.0 / k.size))
    return out


def _expand_phi(spec, design, theta, lay):
    T = design.T
    if isinstance(spec, TableSpec):
        return [_table_values(theta, lay.phi_slices, lay.phi_index[t]) for t in range(T)]
    coefs = {}
    for term, slc in lay.phi_slices.items():
        if term == "occeff":
            if isinstance(slc, list):
                coefs[term] = [theta[s] for s in slc]
            else:
                shared = theta[slc]
                coefs[term] = [shared[: design.K[t - 1] - 1] for t in range(1, T + 1)]
        else:
            coefs[term] = _coef_by_period(slc, theta, T)
    out = []
    for t in range(1, T + 1):
        ap, K = design.a_prime[t - 1], design.K[t - 1]
        k = np.arange(1, K, dtype=float)[None, :]
        a = np.arange(ap - 1, dtype=float)[:, None]
        eta = np.zeros((ap - 1, K - 1))
        if "intercept" in coefs:
            eta = eta + coefs["intercept"][t - 1]
        if "slope" in coefs:
            eta = eta + coefs["slope"][t - 1] * k
        if "occeff" in coefs:
            eta = eta + coefs["occeff"][t - 1][None, :]
        if "age" in coefs:
            eta = eta + coefs["age"][t - 1] * a
        out.append(expit(eta))
    return out


def _extract_beta(spec, params, design, theta, lay):
    if spec == "free":
        for t in range(1, design.T + 1):
            theta[lay.beta_slices[t - 1]] = logits_from_simplex(params.beta[t - 1])
        return
    # The normalisation makes the map nonlinear; solve for the coefficients
    # by least squares on the arrival simplexes themselves.
    slices = list(lay.beta_slices.values())
    lo = min(s.start for s in slices)
    hi = max(s.stop for s in slices)
    targets = np.concatenate([params.beta[t - 1] for t in range(1, design.T + 1)])

    def residual(x):
        probe = theta.copy()
        probe[lo:hi] = x
        model = np.concatenate(_expand_beta(spec, design, probe, lay))
        return model - targets

    sol = least_squares(residual, np.zeros(hi - lo), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    theta[lo:hi] = sol.x


def _extract_phi(spec, params, design, theta, lay):
    if isinstance(spec, TableSpec):
        size = lay.phi_slices.stop - lay.phi_slices.start
        sums = np.zeros(size)
        counts = np.zeros(size)
        for t in range(design.T):
            # only reachable cells (class index < size) contribute
            _table_accumulate(sums, counts, lay.phi_index[t], params.phi[t])
        theta[lay.phi_slices] = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
        return
    # logit(phi) is linear in the coefficients: least squares on reachable cells
    columns = []
    offsets = {}
    for term, slc in lay.phi_slices.items():
        if isinstance(slc, list):
            offsets[term] = [s.start for s in slc]
            columns += [(term, t + 1, j) for t, s in enumerate(slc) for j in range(s.stop - s.start)]
        else:
            offsets[term] = slc.start
            columns += [(term, None, j) for j in range(slc.stop - slc.start)]
    col_pos = {c: i for i, c in enumerate(columns)}
    rows, targets, col_theta = [], [], np.zeros(len(columns))
    for (t, k, a) in _phi_cells(design):
        row = np.zeros(len(columns))
        for term, slc in lay.phi_slices.items():
            if term == "occeff":
                if isinstance(slc, list):
                    row[col_pos[(term, t, k - 1)]] = 1.0
                else:
                    row[col_pos[(term, None, k - 1)]] = 1.0
            else:
                width = slc.stop - slc.start
                j = 0 if width == 1 else t - 1
                feature = {"intercept": 1.0, "slope": float(k), "age": float(a - 1)}[term]
                row[col_pos[(term, None, j)]] = feature
        rows.append(row)
        targets.append(float(logit(params.phi[t - 1][a - 1, k - 1])))
    coef, *_ = np.linalg.lstsq(np.asarray(rows), np.asarray(targets), rcond=None)
    for i, (term, t, j) in enumerate(columns):
        if t is None:
            theta[offsets[term] + j] = coef[i]
        else:
            theta[offsets[term][t - 1] + j] = coef[i]


# -- parsing ------------------------------------------------------------------

_FIELDS = ("r", "s", "alpha", "psi", "beta", "phi", "p")


def parse_structure(text):
    """Parse the semicolon-separated grammar into a :class:`ModelStructure`.

    Omitted families keep their defaults (everything constant, logistic
    intercept+slope arrival and retention).
    """
    fields = {}
    for raw in text.split(";"):
        raw = raw.strip()
        if not raw:
            continue
        if "=" not in raw:
            raise StructureError(f"expected field=value, got {raw!r}")
        key, value = raw.split("=", 1)
        key, value = key.strip(), value.strip()
        if key not in _FIELDS:
            raise StructureError(f"unknown structure field {key!r}")
        if key in fields:
            raise StructureError(f"duplicate structure field {key!r}")
        fields[key] = value
    kwargs = {}
    for key, value in fields.items():
        if key in ("r", "alpha", "psi"):
            kwargs[key] = value
        elif key == "beta":
            kwargs[key] = value if value == "free" else _parse_logistic(value)
        elif key == "phi":
            kwargs[key] = _parse_logistic(value) if value.startswith("logistic") else _parse_table(value)
        else:
            kwargs[key] = _parse_table(value)
    return ModelStructure(**kwargs)


def _parse_table(value):
    if value == "const":
        return TableSpec()
    return TableSpec(tuple(part.strip() for part in value.split("*")))


def _parse_logistic(value):
    if not (value.startswith("logistic(") and value.endswith(")")):
        raise StructureError(f"malformed logistic spec {value!r}")
    inner = value[len("logistic(") : -1]
    terms = []
    for part in inner.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" in part:
            term, mode = part.split("=", 1)
        else:
            term, mode = part, "shared"
        terms.append((term.strip(), mode.strip()))
    return LogisticSpec(tuple(terms))


def apply_move(structure, move_text):
    """Replace one field of a structure, e.g. ``apply_move(st, "s=year")``."""
    move_text = move_text.strip()
    if "=" not in move_text:
        raise StructureError(f"a move must look like field=value, got {move_text!r}")
    key = move_text.split("=", 1)[0].strip()
    if key not in _FIELDS:
        raise StructureError(f"unknown structure field {key!r}")
    parsed = parse_structure(move_text)
    return replace(structure, **{key: getattr(parsed, key)})


CONSTANT_STRUCTURE = ModelStructure()

# Structure of the built-in simulation scenario: year-dependent recruitment,
# constant survival, shared-intercept/year-slope arrival regression,
# shared occasion-effect + age-slope retention, state-dependent capture.
GENERATING_STRUCTURE = ModelStructure(
    r="year",
    s=TableSpec(),
    alpha="const",
    psi="const",
    beta=LogisticSpec((("intercept", "shared"), ("slope", "year"))),
    phi=LogisticSpec((("occeff", "shared"), ("age", "shared"))),
    p=TableSpec(("state",)),
)


def named_structure(name):
    """Resolve a named alias or parse a grammar string."""
    if name == "constant":
        return CONSTANT_STRUCTURE
    if name == "generating":
        return GENERATING_STRUCTURE
    return parse_structure(name)
