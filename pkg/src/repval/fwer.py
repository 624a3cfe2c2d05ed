"""Bonferroni-based FWER r-values.

The FWER r-value is the lowest family-wise error level at which a feature
can be called replicated. It solves f(r) = r for

    f_j(x) = max(m * p1_j / c1(x),  R1 * p2_j / c2),
    c1(x) = (1 - c2) / (1 - l00 * (1 - c2 * x)),

in [0, 1), and is 1 when no solution exists. f(x)/x is strictly decreasing,
so the same bisection as the FDR pipeline applies; each max branch is affine
in x, and the test suite cross-checks bisection against that closed form.
"""

from __future__ import annotations

import numpy as np

from .model import AnalysisConfig, Method, RValueReport, ValidatedDataset
from .rvalue import _bisect_threshold, c1

__all__ = ["bonferroni_rvalue", "bonferroni_rvalues_all"]


def _bonf_rvalues(p1: np.ndarray, p2: np.ndarray,
                  config: AnalysisConfig) -> np.ndarray:
    r1 = len(p1)
    follow = r1 * p2 / config.c2  # constant in x
    out = np.ones(r1)
    for i in range(r1):
        def crossed(x: float, _i=i) -> bool:
            f = max(config.m * p1[_i] / c1(x, config.l00, config.c2),
                    follow[_i])
            return f <= x
        out[i] = _bisect_threshold(crossed)
    return out


def bonferroni_rvalue(dataset: ValidatedDataset, config: AnalysisConfig,
                      feature_id: str) -> float:
    """FWER r-value of one feature."""
    idx = dataset.index_of(feature_id)
    return float(_bonf_rvalues(dataset.p1, dataset.p2, config)[idx])


def bonferroni_rvalues_all(dataset: ValidatedDataset,
                           config: AnalysisConfig) -> RValueReport:
    """FWER r-values for every followed-up feature."""
    values = _bonf_rvalues(dataset.p1, dataset.p2, config)
    entries = tuple(zip(dataset.ids, (float(v) for v in values)))
    return RValueReport(Method.FWER_BONFERRONI, entries, config)
