"""Conditional-independence backends.

Every backend answers the query "are variables i and j independent given
the set s?" through :meth:`CiBackend.independent`.  The oracle backend
reads the answer off a true DAG via d-separation; the Gaussian backend
tests a partial correlation with the Fisher z transform; wrappers add
deterministic answer overrides and per-phase test counting.
"""

from __future__ import annotations

import io
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import atanh, sqrt
from typing import Iterable, Mapping

import numpy as np
from scipy.stats import norm

from .graph import Dag

__all__ = [
    "Dataset",
    "SuffStat",
    "CiBackend",
    "OracleBackend",
    "GaussBackend",
    "NoisyBackend",
    "CountingBackend",
    "CIDegeneracyError",
    "DataFormatError",
    "canonical_query",
]

_R_CLAMP = 1.0 - 1e-12
_COND_LIMIT = 1e12


class CIDegeneracyError(ValueError):
    """Raised when a dataset cannot support the Gaussian test at all."""


class DataFormatError(ValueError):
    """Raised when a dataset CSV cannot be parsed."""


@dataclass(frozen=True)
class Dataset:
    """An n x p real matrix with column labels and no missing values."""

    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise DataFormatError("data must be a 2-d matrix")
        if len(self.labels) != values.shape[1]:
            raise DataFormatError("label count does not match column count")
        if not np.all(np.isfinite(values)):
            raise DataFormatError("data contains missing or non-finite values")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_csv_text(cls, text: str) -> "Dataset":
        lines = [ln for ln in text.splitlines() if ln.strip() != ""]
        if len(lines) < 2:
            raise DataFormatError("data file needs a header and at least one row")
        labels = tuple(s.strip() for s in lines[0].split(","))
        rows = []
        for lineno, ln in enumerate(lines[1:], start=2):
            cells = ln.split(",")
            if len(cells) != len(labels):
                raise DataFormatError(f"line {lineno}: expected {len(labels)} cells")
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise DataFormatError(f"line {lineno}: non-numeric cell") from exc
        return cls(np.asarray(rows, dtype=float), labels)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.labels) + "\n")
        for row in self.values:
            buf.write(",".join(repr(float(x)) for x in row) + "\n")
        return buf.getvalue()


@dataclass(frozen=True)
class SuffStat:
    """Sufficient statistics for the partial-correlation test."""

    correlation: np.ndarray
    n: int

    def __post_init__(self):
        corr = np.asarray(self.correlation, dtype=float)
        object.__setattr__(self, "correlation", corr)
        if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
            raise ValueError("correlation must be a square matrix")
        if not np.allclose(corr, corr.T, atol=1e-8):
            raise ValueError("correlation must be symmetric")
        if not np.allclose(np.diag(corr), 1.0, atol=1e-8):
            raise ValueError("correlation must have a unit diagonal")
        if np.any(np.abs(corr) > 1.0 + 1e-8):
            raise ValueError("correlation entries must lie in [-1, 1]")

    @property
    def p(self) -> int:
        return self.correlation.shape[0]

    @classmethod
    def from_dataset(cls, data: Dataset) -> "SuffStat":
        if data.n < 2:
            raise CIDegeneracyError("need at least two observations")
        sd = data.values.std(axis=0)
        if np.any(sd == 0):
            bad = [data.labels[k] for k in np.nonzero(sd == 0)[0]]
            raise CIDegeneracyError(f"constant columns: {', '.join(bad)}")
        corr = np.corrcoef(data.values, rowvar=False)
        if not np.all(np.isfinite(corr)):
            raise CIDegeneracyError("correlation matrix has non-finite entries")
        return cls(corr, data.n)


def canonical_query(i: int, j: int, s: Iterable[int]) -> tuple[int, int, tuple[int, ...]]:
    """Order-free key for a CI query: unordered pair plus sorted conditioning set."""
    a, b = (int(i), int(j)) if i < j else (int(j), int(i))
    return a, b, tuple(sorted(int(v) for v in s))


def _check_query(p: int, i: int, j: int, s: Iterable[int]) -> frozenset[int]:
    s = frozenset(int(v) for v in s)
    for v in (i, j, *s):
        if not 0 <= v < p:
            raise IndexError(f"variable index {v} out of range [0, {p})")
    if i == j:
        raise ValueError("query requires two distinct variables")
    if i in s or j in s:
        raise ValueError("conditioning set must not contain the queried variables")
    return s


class CiBackend(ABC):
    """Query interface; implementations never mutate visible state beyond counters."""

    @abstractmethod
    def independent(self, i: int, j: int, s: Iterable[int] = ()) -> bool:
        """True iff variable ``i`` is judged independent of ``j`` given ``s``."""


class OracleBackend(CiBackend):
    """Answers queries with the true d-separations of a DAG (faithfulness built in)."""

    def __init__(self, dag: Dag):
        self.dag = dag

    def independent(self, i: int, j: int, s: Iterable[int] = ()) -> bool:
        s = _check_query(self.dag.p, i, j, s)
        return self.dag.d_separated(i, j, s)


class GaussBackend(CiBackend):
    """Fisher-z partial correlation test on a fixed correlation matrix.

    Independence is declared when ``|z| <= Phi^-1(1 - alpha/2)`` with
    ``z = sqrt(n - |s| - 3) * artanh(r)``.  If ``n - |s| - 3 < 1`` the test
    cannot be run and dependence (edge retained) is reported, which is the
    conservative failure.  Ill-conditioned submatrices fall back to a
    pseudo-inverse and are counted in ``degenerate_queries``.
    """

    def __init__(self, suffstat: SuffStat, alpha: float):
        if not 0 < alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        self.suffstat = suffstat
        self.alpha = alpha
        self.cutoff = float(norm.ppf(1 - alpha / 2))
        self.degenerate_queries = 0

    def partial_correlation(self, i: int, j: int, s: Iterable[int] = ()) -> float:
        """Partial correlation of i and j given s, via submatrix inversion."""
        s = _check_query(self.suffstat.p, i, j, s)
        return self._pcor(i, j, s)

    def _pcor(self, i: int, j: int, s) -> float:
        corr = self.suffstat.correlation
        if not s:
            r = float(corr[i, j])
        else:
            idx = [i, j, *sorted(s)]
            sub = corr[np.ix_(idx, idx)]
            prec = None
            try:
                prec = np.linalg.inv(sub)
                # kappa_1 = ||A||_1 * ||A^-1||_1, cheap with the inverse in hand
                kappa = np.abs(sub).sum(axis=0).max() * np.abs(prec).sum(axis=0).max()
                if not np.isfinite(kappa) or kappa > _COND_LIMIT:
                    prec = None
            except np.linalg.LinAlgError:
                prec = None
            if prec is None:
                self.degenerate_queries += 1
                prec = np.linalg.pinv(sub)
            denom = prec[0, 0] * prec[1, 1]
            if not np.isfinite(denom) or denom <= 0:
                self.degenerate_queries += 1
                return float("nan")
            r = float(-prec[0, 1] / sqrt(denom))
        if not np.isfinite(r):
            return float("nan")
        return max(-_R_CLAMP, min(_R_CLAMP, r))

    def independent(self, i: int, j: int, s: Iterable[int] = ()) -> bool:
        s = _check_query(self.suffstat.p, i, j, s)
        dof = self.suffstat.n - len(s) - 3
        if dof < 1:
            return False
        r = self._pcor(i, j, s)
        if not np.isfinite(r):
            return False
        z = sqrt(dof) * atanh(r)
        return abs(z) <= self.cutoff


class NoisyBackend(CiBackend):
    """Delegate with a deterministic schedule of forced answers.

    ``flips`` maps canonicalized queries (see :func:`canonical_query`) to the
    answer to return instead of asking the inner backend.
    """

    def __init__(self, inner: CiBackend, flips: Mapping[tuple, bool]):
        self.inner = inner
        self.flips = {canonical_query(i, j, s): bool(v) for (i, j, s), v in flips.items()}

    def independent(self, i: int, j: int, s: Iterable[int] = ()) -> bool:
        key = canonical_query(i, j, s)
        if key in self.flips:
            return self.flips[key]
        return self.inner.independent(i, j, s)


class CountingBackend(CiBackend):
    """Delegate that tallies queries per (phase, conditioning-set size)."""

    def __init__(self, inner: CiBackend):
        self.inner = inner
        self.phase = ""
        self._counts: dict[tuple[str, int], int] = {}
        self._lock = threading.Lock()

    def set_phase(self, phase: str) -> None:
        self.phase = phase

    def independent(self, i: int, j: int, s: Iterable[int] = ()) -> bool:
        s = tuple(s)
        size = len(s)
        with self._lock:
            key = (self.phase, size)
            self._counts[key] = self._counts.get(key, 0) + 1
        return self.inner.independent(i, j, s)

    @property
    def counts(self) -> dict[tuple[str, int], int]:
        return dict(self._counts)

    def by_size(self, phase: str | None = None) -> dict[int, int]:
        """Counts keyed by conditioning-set size, optionally restricted to one phase."""
        out: dict[int, int] = {}
        for (ph, size), c in self._counts.items():
            if phase is not None and ph != phase:
                continue
            out[size] = out.get(size, 0) + c
        return out

    def total(self) -> int:
        return sum(self._counts.values())

    def snapshot(self) -> dict[str, list[int]]:
        """Per-phase count vectors indexed by conditioning-set size."""
        out: dict[str, list[int]] = {}
        for (ph, size), c in self._counts.items():
            vec = out.setdefault(ph, [])
            if len(vec) <= size:
                vec.extend([0] * (size + 1 - len(vec)))
            vec[size] += c
        return out
