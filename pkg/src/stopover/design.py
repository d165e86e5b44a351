"""Study layout and capture-history data containers.

A study consists of ``T`` primary periods, period ``t`` holding ``K(t)``
secondary capture occasions.  Observable states are labelled ``1..G``; a
per-period availability set restricts which states can actually occur in a
given period (state labels stay fixed while availability changes).  ``A'``
caps the number of primary periods an individual can be tracked through and
``a'(t)`` caps the within-period age (occasions since arrival).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError


def _freeze(arr):
    arr = np.asarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class StudyDesign:
    """Shape of the sampling scheme.

    Parameters
    ----------
    T : int
        Number of primary periods.
    K : tuple of int
        Occasions per primary period, length ``T``.
    G : int
        Number of observable states.
    availability : tuple of tuple of int, optional
        States (1-based) observable in each period.  Defaults to all states
        in every period.
    A_prime : int, optional
        Maximum trackable age on the primary level, ``<= T``.  Defaults to
        ``T``.
    a_prime : tuple of int, optional
        Maximum trackable within-period age per period, ``a'(t) <= K(t)``.
        Defaults to ``K``.
    """

    T: int
    K: tuple
    G: int
    availability: tuple = None
    A_prime: int = None
    a_prime: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "K", tuple(int(k) for k in self.K))
        if self.availability is None:
            avail = tuple(tuple(range(1, self.G + 1)) for _ in range(self.T))
        else:
            avail = tuple(tuple(sorted(set(int(g) for g in a))) for a in self.availability)
        object.__setattr__(self, "availability", avail)
        if self.A_prime is None:
            object.__setattr__(self, "A_prime", self.T)
        if self.a_prime is None:
            object.__setattr__(self, "a_prime", self.K)
        else:
            object.__setattr__(self, "a_prime", tuple(int(a) for a in self.a_prime))
        self._validate()

    def _validate(self):
        if self.T < 1:
            raise ConstraintError("T must be >= 1")
        if len(self.K) != self.T:
            raise ConstraintError("K must have one entry per primary period")
        if any(k < 1 for k in self.K):
            raise ConstraintError("every K(t) must be >= 1")
        if self.G < 1:
            raise ConstraintError("G must be >= 1")
        if not 1 <= self.A_prime <= self.T:
            raise ConstraintError("A_prime must satisfy 1 <= A_prime <= T")
        if len(self.a_prime) != self.T:
            raise ConstraintError("a_prime must have one entry per primary period")
        for t, (a, k) in enumerate(zip(self.a_prime, self.K), start=1):
            if not 1 <= a <= k:
                raise ConstraintError(f"a_prime({t}) must satisfy 1 <= a'(t) <= K(t)")
        if len(self.availability) != self.T:
            raise ConstraintError("availability must have one entry per primary period")
        for t, states in enumerate(self.availability, start=1):
            if not states:
                raise ConstraintError(f"availability({t}) must be non-empty")
            if any(g < 1 or g > self.G for g in states):
                raise ConstraintError(f"availability({t}) contains states outside 1..{self.G}")

    @property
    def total_occasions(self):
        return sum(self.K)

    def period_columns(self, t):
        """Column slice of a flattened history belonging to period ``t`` (1-based)."""
        start = sum(self.K[: t - 1])
        return slice(start, start + self.K[t - 1])

    def secondary_size(self, t):
        """Hidden-state count of the within-period chain for period ``t``."""
        return self.a_prime[t - 1] * self.G + 2

    @property
    def primary_size(self):
        """Hidden-state count of the between-period chain."""
        return self.A_prime + 2

    def full_availability(self):
        return all(len(a) == self.G for a in self.availability)


@dataclass(frozen=True)
class Dataset:
    """Unique capture histories with multiplicities.

    ``histories`` is a ``(J, sum(K))`` integer array with entries in
    ``0..G`` (0 = not captured, g = captured in state g), rows pairwise
    distinct and each containing at least one capture.  ``counts`` gives the
    multiplicity of each row; ``n`` is the number of observed individuals.
    """

    design: StudyDesign
    histories: np.ndarray
    counts: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        hist = np.ascontiguousarray(np.asarray(self.histories, dtype=np.int64))
        if hist.ndim != 2:
            hist = hist.reshape(len(hist), -1) if hist.size else hist.reshape(0, self.design.total_occasions)
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "histories", _freeze(hist))
        object.__setattr__(self, "counts", _freeze(counts))
        self._validate()

    def _validate(self):
        d = self.design
        if self.histories.shape[1] != d.total_occasions:
            raise ConstraintError(
                f"histories must have {d.total_occasions} columns, got {self.histories.shape[1]}"
            )
        if self.counts.shape != (self.histories.shape[0],):
            raise ConstraintError("counts must align with history rows")
        if np.any(self.counts < 1):
            raise ConstraintError("every multiplicity must be >= 1")
        if self.histories.size:
            if self.histories.min() < 0 or self.histories.max() > d.G:
                raise ConstraintError(f"history entries must lie in 0..{d.G}")
            if not self.histories.any(axis=1).all():
                raise ConstraintError("every history must contain at least one capture")
            for t in range(1, d.T + 1):
                block = self.histories[:, d.period_columns(t)]
                seen = set(np.unique(block)) - {0}
                allowed = set(d.availability[t - 1])
                if not seen <= allowed:
                    raise ConstraintError(
                        f"period {t} contains states {sorted(seen - allowed)} outside its availability"
                    )
            uniq = np.unique(self.histories, axis=0)
            if uniq.shape[0] != self.histories.shape[0]:
                raise ConstraintError("histories must be pairwise distinct")

    @property
    def n(self):
        """Number of observed individuals."""
        return int(self.counts.sum())

    @property
    def J(self):
        """Number of unique capture histories."""
        return self.histories.shape[0]

    def period_block(self, t):
        """History columns for period ``t`` as a ``(J, K(t))`` view."""
        return self.histories[:, self.design.period_columns(t)]

    def expanded(self):
        """Histories repeated per multiplicity, one row per observed individual."""
        if self.J == 0:
            return self.histories.copy()
        return np.repeat(self.histories, self.counts, axis=0)


def dataset_from_rows(design, rows):
    """Aggregate raw per-individual history rows into a :class:`Dataset`.

    Rows are deduplicated (lexicographic order) and their multiplicities
    summed; all-zero rows are rejected.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return Dataset(design, np.zeros((0, design.total_occasions), dtype=np.int64), np.zeros(0, dtype=np.int64))
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    return Dataset(design, uniq, counts)


def single_period_dataset(dataset, t):
    """Project a dataset onto primary period ``t`` as a standalone one-period study.

    Individuals never captured in period ``t`` are dropped; the resulting
    design has ``T=1`` and inherits ``K(t)``, availability and ``a'(t)``.
    """
    d = dataset.design
    sub = StudyDesign(
        T=1,
        K=(d.K[t - 1],),
        G=d.G,
        availability=(d.availability[t - 1],),
        A_prime=1,
        a_prime=(d.a_prime[t - 1],),
    )
    block = dataset.period_block(t)
    keep = block.any(axis=1)
    rows = np.repeat(block[keep], dataset.counts[keep], axis=0)
    return dataset_from_rows(sub, rows)
