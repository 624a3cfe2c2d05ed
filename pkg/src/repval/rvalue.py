"""FDR r-values for two-study replication, and the equivalent step-up rule.

The r-value of a followed-up feature is the lowest FDR level at which that
feature can be declared replicated. It is computed in three stages:

1. combine each feature's p-value pair into an e-value
       e_j(x) = max(p1_j / c1(x),  R1 * p2_j / (m * c2))
   where c1(x) = (1 - c2) / (1 - l00 * (1 - c2 * x)) spends the error budget
   saved by the null-in-both fraction bound l00;
2. turn e-values into step-up-adjusted values
       f_i(x) = min over {j : e_j >= e_i} of e_j * m / rank(e_j)
   (maximum rank for ties);
3. report the fixed point f_i(r) = r in (0, 1) if it exists, else 1.

f_i(x)/x is strictly decreasing in x, so the predicate f_i(x) <= x is a
half-line and plain bisection is unconditionally robust. Declaring features
with r-value <= q is equivalent to the direct step-up rule implemented by
:func:`step_up_set`; the suite checks that equivalence exhaustively.

All functions are pure; r-values for distinct features may be computed
concurrently and are bitwise reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import AnalysisConfig, Method, RValueReport, ValidatedDataset

__all__ = [
    "c1", "EValueVector", "e_values", "f_i", "f_values",
    "fdr_rvalue", "fdr_rvalues_all", "StepUpResult", "step_up_set",
    "BISECT_LO", "BISECT_HI", "BISECT_ITERATIONS",
]

BISECT_LO = 1e-12
BISECT_HI = 1.0 - 1e-12
BISECT_ITERATIONS = 80


def c1(x: float, l00: float, c2: float) -> float:
    """Primary-study budget multiplier; increasing in x when l00 > 0 and
    constant 1 - c2 when l00 = 0. The denominator is bounded below by
    1 - l00 > 0 on the valid domain, so this never degenerates."""
    return (1.0 - c2) / (1.0 - l00 * (1.0 - c2 * x))


@dataclass(frozen=True)
class EValueVector:
    """Combined statistics at a given budget level x, with maximum-rank
    tie handling. e depends on x through c1."""

    e: np.ndarray
    rank: np.ndarray
    evaluated_at: float


def _ranks_max_ties(e: np.ndarray) -> np.ndarray:
    order = np.sort(e)
    return np.searchsorted(order, e, side="right")


def _e_array(p1: np.ndarray, p2: np.ndarray, r1: int, m_eff: float,
             c2: float, c1x: float) -> np.ndarray:
    return np.maximum(p1 / c1x, r1 * p2 / (m_eff * c2))


def _adjusted_min(e: np.ndarray, m_eff: float) -> np.ndarray:
    """For every feature i, min over {j : e_j >= e_i} of e_j*m/rank(e_j)."""
    order = np.sort(e)
    ranks = np.searchsorted(order, order, side="right")
    adjusted = order * m_eff / ranks
    suffix_min = np.minimum.accumulate(adjusted[::-1])[::-1]
    return suffix_min[np.searchsorted(order, e, side="left")]


def _resolve(config: AnalysisConfig, m_eff: Optional[float],
             c1_fn: Optional[Callable[[float], float]]):
    if m_eff is None:
        m_eff = float(config.m)
    if c1_fn is None:
        def c1_fn(x: float, _l=config.l00, _c=config.c2) -> float:
            return c1(x, _l, _c)
    return m_eff, c1_fn


def e_values(dataset: ValidatedDataset, config: AnalysisConfig, x: float,
             *, m_eff: Optional[float] = None,
             c1_fn: Optional[Callable[[float], float]] = None) -> EValueVector:
    """Per-feature e-values and their (maximum-tie) ranks at level x."""
    m_eff, c1_fn = _resolve(config, m_eff, c1_fn)
    e = _e_array(dataset.p1, dataset.p2, len(dataset), m_eff, config.c2,
                 c1_fn(x))
    return EValueVector(e, _ranks_max_ties(e), x)


def f_values(dataset: ValidatedDataset, config: AnalysisConfig, x: float,
             *, m_eff: Optional[float] = None,
             c1_fn: Optional[Callable[[float], float]] = None) -> np.ndarray:
    """f_i(x) for every feature, in dataset order."""
    m_eff, c1_fn = _resolve(config, m_eff, c1_fn)
    e = _e_array(dataset.p1, dataset.p2, len(dataset), m_eff, config.c2,
                 c1_fn(x))
    return _adjusted_min(e, m_eff)


def f_i(dataset: ValidatedDataset, config: AnalysisConfig, x: float,
        feature_id: str) -> float:
    """Step-up-adjusted value of one feature at level x."""
    return float(f_values(dataset, config, x)[dataset.index_of(feature_id)])


def _bisect_threshold(predicate: Callable[[float], bool]) -> float:
    """Smallest x (within tolerance) where a monotone predicate turns true;
    1.0 if it never does on (0, 1)."""
    hi = BISECT_HI
    if not predicate(hi):
        return 1.0
    lo = BISECT_LO
    if predicate(lo):
        return lo
    for _ in range(BISECT_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _rvalues_array(p1: np.ndarray, p2: np.ndarray, *, m_eff: float, c2: float,
                   c1_fn: Callable[[float], float]) -> np.ndarray:
    r1 = len(p1)
    out = np.ones(r1)
    for i in range(r1):
        def crossed(x: float, _i=i) -> bool:
            e = _e_array(p1, p2, r1, m_eff, c2, c1_fn(x))
            return _adjusted_min(e, m_eff)[_i] <= x
        out[i] = _bisect_threshold(crossed)
    return out


def fdr_rvalue(dataset: ValidatedDataset, config: AnalysisConfig,
               feature_id: str) -> float:
    """FDR r-value of one feature: the unique fixed point of f_i in (0, 1)
    if it exists, else 1."""
    idx = dataset.index_of(feature_id)
    m_eff, c1_fn = _resolve(config, None, None)

    def crossed(x: float) -> bool:
        e = _e_array(dataset.p1, dataset.p2, len(dataset), m_eff, config.c2,
                     c1_fn(x))
        return _adjusted_min(e, m_eff)[idx] <= x

    return _bisect_threshold(crossed)


def fdr_rvalues_all(dataset: ValidatedDataset,
                    config: AnalysisConfig) -> RValueReport:
    """FDR r-values for every followed-up feature (independence variant)."""
    m_eff, c1_fn = _resolve(config, None, None)
    values = _rvalues_array(dataset.p1, dataset.p2, m_eff=m_eff,
                            c2=config.c2, c1_fn=c1_fn)
    entries = tuple(zip(dataset.ids, (float(v) for v in values)))
    return RValueReport(Method.FDR_INDEPENDENT, entries, config)


@dataclass(frozen=True)
class StepUpResult:
    """Largest self-consistent rejection count at target level q, and the
    features passing both thresholds at that count."""

    q: float
    r2_count: int
    replicated_ids: frozenset[str]


def _minimal_counts(p1: np.ndarray, p2: np.ndarray, *, m_eff: float,
                    r1: int, c2: float, c1_at_q: float, q: float) -> np.ndarray:
    """Per feature, the smallest rejection count r at which it passes both
    thresholds p1 <= r*c1(q)*q/m and p2 <= r*c2*q/R1."""
    unit1 = c1_at_q * q / m_eff
    unit2 = c2 * q / r1
    need1 = np.ceil(p1 / unit1)
    need2 = np.ceil(p2 / unit2)
    return np.maximum(need1, need2)


def _step_up_mask(p1: np.ndarray, p2: np.ndarray, *, m_eff: float, c2: float,
                  c1_at_q: float, q: float) -> np.ndarray:
    r1 = len(p1)
    if r1 == 0:
        return np.zeros(0, dtype=bool)
    need = _minimal_counts(p1, p2, m_eff=m_eff, r1=r1, c2=c2,
                           c1_at_q=c1_at_q, q=q)
    sorted_need = np.sort(need)
    r2 = 0
    for r in range(r1, 0, -1):
        if np.searchsorted(sorted_need, r, side="right") == r:
            r2 = r
            break
    return need <= r2


def step_up_set(dataset: ValidatedDataset, config: AnalysisConfig, q: float,
                *, m_eff: Optional[float] = None,
                c1_at_q: Optional[float] = None) -> StepUpResult:
    """Direct step-up procedure at level q; equivalent to thresholding the
    r-values at q."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q!r}")
    if m_eff is None:
        m_eff = float(config.m)
    if c1_at_q is None:
        c1_at_q = c1(q, config.l00, config.c2)
    mask = _step_up_mask(dataset.p1, dataset.p2, m_eff=m_eff, c2=config.c2,
                         c1_at_q=c1_at_q, q=q)
    ids = frozenset(fid for fid, hit in zip(dataset.ids, mask) if hit)
    return StepUpResult(q, int(mask.sum()), ids)
