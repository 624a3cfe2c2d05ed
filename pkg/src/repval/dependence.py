"""Conservative r-value variants valid under arbitrary dependence among the
primary-study p-values.

Two modifications of the baseline pipeline:

* general dependence: every occurrence of m in the e-value/adjustment stage
  is replaced by m* = m * H_m (H_m the m-th harmonic number). Note the m in
  the e-value's follow-up branch cancels against the adjustment numerator,
  so the net effect is the harmonic inflation of the primary-study
  multiplicity only.

* threshold-dependent selection: when every followed-up feature passed a
  fixed primary-study cutoff t, c1(x) is replaced by the smaller
      c1~(x) = max{a : a * (1 + sum_{i=1}^{ceil(t*m/(a*x)) - 1} 1/i) = c1(x)}
  and the r-value becomes min{x : f_i(x) <= x} (f is only right-continuous
  here, but f(x)/x is still monotone, so the same bisection applies).

Both produce r-values no smaller than the baseline, and both have exact
step-up equivalents checked by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import AnalysisConfig, Method, RValueReport, ValidatedDataset
from .rvalue import (StepUpResult, _rvalues_array, c1, step_up_set)

__all__ = [
    "harmonic_number", "m_star", "HarmonicInflation", "c1_tilde",
    "NoConsistentRegime", "SelectionThresholdViolated", "MissingThreshold",
    "fdr_rvalue_general_dep", "fdr_rvalues_all_general_dep",
    "step_up_set_general_dep", "fdr_rvalue_threshold_dep",
    "fdr_rvalues_all_threshold_dep", "step_up_set_threshold_dep",
]

_EULER_GAMMA = 0.5772156649015329
_EXACT_TABLE_SIZE = 1024
_EXACT_SUM_LIMIT = 10**6

# prefix[k] = H_k, exact for the small values the regime search probes often
_PREFIX = np.concatenate(
    [[0.0], np.cumsum(1.0 / np.arange(1, _EXACT_TABLE_SIZE + 1))])


def harmonic_number(n: int) -> float:
    """H_n = sum_{i=1}^{n} 1/i. Exact table lookup for small n, asymptotic
    expansion above (relative error < 1e-14 past the table)."""
    if n < 0:
        raise ValueError("harmonic_number needs n >= 0")
    if n <= _EXACT_TABLE_SIZE:
        return float(_PREFIX[n])
    n_f = float(n)
    return (math.log(n_f) + _EULER_GAMMA + 1.0 / (2.0 * n_f)
            - 1.0 / (12.0 * n_f * n_f) + 1.0 / (120.0 * n_f**4))


@lru_cache(maxsize=64)
def _harmonic_exact(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


def m_star(m: int) -> float:
    """Harmonic-inflated multiplicity m * H_m; direct summation up to 1e6
    features, asymptotic beyond."""
    if m < 1:
        raise ValueError("m must be positive")
    if m <= _EXACT_TABLE_SIZE:
        return m * float(_PREFIX[m])
    if m <= _EXACT_SUM_LIMIT:
        return m * _harmonic_exact(m)
    return m * harmonic_number(m)


@dataclass(frozen=True)
class HarmonicInflation:
    m: int
    m_star: float

    @classmethod
    def from_m(cls, m: int) -> "HarmonicInflation":
        return cls(m, m_star(m))


class NoConsistentRegime(RuntimeError):
    """Regime enumeration found no k with ceil(t*m/(a_k*x) - 1) = k. The
    defining equation always has a solution (the integer excess walks down
    in unit steps), so hitting this indicates a numerical corner worth a
    look rather than something to paper over."""


class MissingThreshold(ValueError):
    """Threshold-dependent variant requested without config.t."""


class SelectionThresholdViolated(ValueError):
    """Some primary p-value exceeds the declared selection threshold t."""


def c1_tilde(x: float, t: float, m: int, l00: float, c2: float) -> float:
    """Largest a with a * (1 + H_k) = c1(x) where k = ceil(t*m/(a*x) - 1).

    Solved exactly by locating the consistent integer regime: candidates are
    a_k = c1(x) / (1 + H_k), and the largest accepted candidate is the one
    with the smallest consistent k. For k >= C = t*m/(c1(x)*x) the integer
    excess g(k) - k (g(k) = ceil(C*(1+H_k) - 1)) is nonincreasing and steps
    down by at most 1, so it hits 0 exactly; below C there is no solution
    except the empty-sum regime k = 0 (t small enough), where c1~ = c1.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x!r}")
    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie in (0, 1), got {t!r}")
    base = c1(x, l00, c2)
    big_c = t * m / (base * x)
    if big_c <= 1.0:
        return base

    def excess(k: int) -> int:
        return math.ceil(big_c * (1.0 + harmonic_number(k)) - 1.0) - k

    lo = max(1, math.ceil(big_c) - 1)
    hi = lo + 1
    while excess(hi) > 0:
        lo = hi
        hi *= 2
        if hi > 2**62:
            raise NoConsistentRegime(
                f"no consistent regime below 2^62 for x={x}, t={t}, m={m}")
    while lo < hi:
        mid = (lo + hi) // 2
        if excess(mid) <= 0:
            hi = mid
        else:
            lo = mid + 1
    if excess(lo) != 0:
        raise NoConsistentRegime(
            f"regime walk skipped zero at k={lo} for x={x}, t={t}, m={m}")
    return base / (1.0 + harmonic_number(lo))


# --- general dependence (harmonic inflation) -------------------------------

def fdr_rvalue_general_dep(dataset: ValidatedDataset, config: AnalysisConfig,
                           feature_id: str) -> float:
    """r-value valid under arbitrary primary-study dependence."""
    idx = dataset.index_of(feature_id)
    values = _rvalues_array(
        dataset.p1, dataset.p2, m_eff=m_star(config.m), c2=config.c2,
        c1_fn=lambda x: c1(x, config.l00, config.c2))
    return float(values[idx])


def fdr_rvalues_all_general_dep(dataset: ValidatedDataset,
                                config: AnalysisConfig) -> RValueReport:
    values = _rvalues_array(
        dataset.p1, dataset.p2, m_eff=m_star(config.m), c2=config.c2,
        c1_fn=lambda x: c1(x, config.l00, config.c2))
    entries = tuple(zip(dataset.ids, (float(v) for v in values)))
    return RValueReport(Method.FDR_GENERAL_DEP, entries, config)


def step_up_set_general_dep(dataset: ValidatedDataset, config: AnalysisConfig,
                            q: float) -> StepUpResult:
    return step_up_set(dataset, config, q, m_eff=m_star(config.m))


# --- threshold-dependent selection ------------------------------------------

def _require_threshold(dataset: ValidatedDataset,
                       config: AnalysisConfig) -> float:
    if config.t is None:
        raise MissingThreshold(
            "threshold-dependent variant needs config.t (the selection "
            "cutoff on primary p-values)")
    if len(dataset) and float(dataset.p1.max()) > config.t:
        worst = int(dataset.p1.argmax())
        raise SelectionThresholdViolated(
            f"feature {dataset.ids[worst]!r} has p1={dataset.p1[worst]} "
            f"above the selection threshold t={config.t}")
    return config.t


def fdr_rvalue_threshold_dep(dataset: ValidatedDataset,
                             config: AnalysisConfig,
                             feature_id: str) -> float:
    """r-value valid under arbitrary primary-study dependence when the
    follow-up set was everything below a fixed primary cutoff t."""
    idx = dataset.index_of(feature_id)
    t = _require_threshold(dataset, config)
    values = _rvalues_array(
        dataset.p1, dataset.p2, m_eff=float(config.m), c2=config.c2,
        c1_fn=lambda x: c1_tilde(x, t, config.m, config.l00, config.c2))
    return float(values[idx])


def fdr_rvalues_all_threshold_dep(dataset: ValidatedDataset,
                                  config: AnalysisConfig) -> RValueReport:
    t = _require_threshold(dataset, config)
    values = _rvalues_array(
        dataset.p1, dataset.p2, m_eff=float(config.m), c2=config.c2,
        c1_fn=lambda x: c1_tilde(x, t, config.m, config.l00, config.c2))
    entries = tuple(zip(dataset.ids, (float(v) for v in values)))
    return RValueReport(Method.FDR_THRESHOLD_DEP, entries, config)


def step_up_set_threshold_dep(dataset: ValidatedDataset,
                              config: AnalysisConfig, q: float) -> StepUpResult:
    t = _require_threshold(dataset, config)
    return step_up_set(dataset, config, q,
                       c1_at_q=c1_tilde(q, t, config.m, config.l00, config.c2))
