"""Comparator procedures: BH on the maximum of the two p-values, and
classical meta-analysis combiners for table completeness.

A meta-analysis p-value tests "no signal in either study" and is therefore
weaker evidence than replication; it is provided because results tables
customarily carry one, not as a substitute for r-values. The combined
column is labelled by its combiner (meta_p_fisher / meta_p_stouffer) to
avoid implying it matches any externally published meta-analysis, which may
have pooled more cohorts.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from .model import AnalysisConfig, ValidatedDataset
from .normal import normal_quantile, normal_sf
from .selection import bh_reject

__all__ = ["max_p_bh", "meta_p"]


def max_p_bh(dataset: ValidatedDataset, config: AnalysisConfig,
             q: float) -> frozenset[str]:
    """BH at level q / (1 - l00) on max(p1, p2), with the maximum set to 1
    for the m - R1 features that were not followed up. The l00 inflation
    keeps the comparison with the r-value procedure fair."""
    r1 = len(dataset)
    maxp = np.concatenate([np.maximum(dataset.p1, dataset.p2),
                           np.ones(config.m - r1)])
    rejected = bh_reject(maxp, q / (1.0 - config.l00))
    return frozenset(dataset.ids[i] for i in rejected if i < r1)


def _chi2_sf_4(x: float) -> float:
    """Survival of chi-square with 4 degrees of freedom (Erlang-2)."""
    if x <= 0.0:
        return 1.0
    return math.exp(-0.5 * x) * (1.0 + 0.5 * x)


def meta_p(p1: float, p2: float, combiner: str = "fisher") -> float:
    """Two-study combined p-value.

    fisher   -- chi-square(4) survival at -2 (ln p1 + ln p2)
    stouffer -- standard-normal survival of (z1 + z2)/sqrt(2),
                z = Phi^-1(1 - p)
    """
    if not (0.0 < p1 <= 1.0 and 0.0 < p2 <= 1.0):
        raise ValueError("meta_p needs p-values in (0, 1]")
    if combiner == "fisher":
        return min(1.0, _chi2_sf_4(-2.0 * (math.log(p1) + math.log(p2))))
    if combiner == "stouffer":
        # Phi^-1(1-p) computed as -Phi^-1(p) to keep tiny p exact
        z1 = -normal_quantile(p1)
        z2 = -normal_quantile(p2)
        return float(normal_sf((z1 + z2) / math.sqrt(2.0)))
    raise ValueError(f"unknown combiner {combiner!r}")
