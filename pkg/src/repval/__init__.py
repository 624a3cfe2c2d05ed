"""Replication r-values for two-stage follow-up designs.

The r-value of a followed-up feature is the lowest error-rate level (FDR or
FWER) at which it can be declared replicated across the primary and
follow-up studies; it is read against a target level exactly like a
p-value. The package computes r-values for tables of p-value pairs,
provides the equivalent step-up claim rule, conservative variants for
dependent primary-study p-values, the usual comparison baselines, and a
seeded Monte Carlo harness for verifying error control and power.
"""

from .baselines import max_p_bh, meta_p
from .dependence import (HarmonicInflation, MissingThreshold,
                         NoConsistentRegime, SelectionThresholdViolated,
                         c1_tilde, fdr_rvalue_general_dep,
                         fdr_rvalue_threshold_dep,
                         fdr_rvalues_all_general_dep,
                         fdr_rvalues_all_threshold_dep, harmonic_number,
                         m_star, step_up_set_general_dep,
                         step_up_set_threshold_dep)
from .fwer import bonferroni_rvalue, bonferroni_rvalues_all
from .model import (AnalysisConfig, DatasetError, DuplicateId, FeatureRecord,
                    Method, NonPositivePValue, PValueAboveOne, PValueTable,
                    R1ExceedsM, RValueReport, ValidatedDataset,
                    read_pvalue_table, validate_dataset)
from .normal import normal_cdf, normal_quantile, normal_sf
from .rvalue import (EValueVector, StepUpResult, c1, e_values, f_i, f_values,
                     fdr_rvalue, fdr_rvalues_all, step_up_set)
from .selection import (BHLevel, Explicit, MissingPrimaryVector,
                        SelectionRule, Threshold, TopK, apply_selection,
                        bh_reject, refine_for_replicability)
from .simulate import (RepOutcome, SimulationMetrics, SimulationScenario,
                       compare_baseline, estimate, parse_scenario_file,
                       simulate_rep, sweep_c2)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig", "BHLevel", "DatasetError", "DuplicateId",
    "EValueVector", "Explicit", "FeatureRecord", "HarmonicInflation",
    "Method", "MissingPrimaryVector", "MissingThreshold",
    "NoConsistentRegime", "NonPositivePValue", "PValueAboveOne",
    "PValueTable", "R1ExceedsM", "RValueReport", "RepOutcome",
    "SelectionRule", "SelectionThresholdViolated", "SimulationMetrics",
    "SimulationScenario", "StepUpResult", "Threshold", "TopK",
    "ValidatedDataset", "apply_selection", "bh_reject", "bonferroni_rvalue",
    "bonferroni_rvalues_all", "c1", "c1_tilde", "compare_baseline",
    "e_values", "estimate", "f_i", "f_values", "fdr_rvalue",
    "fdr_rvalue_general_dep", "fdr_rvalue_threshold_dep", "fdr_rvalues_all",
    "fdr_rvalues_all_general_dep", "fdr_rvalues_all_threshold_dep",
    "harmonic_number", "m_star", "max_p_bh", "meta_p", "normal_cdf",
    "normal_quantile", "normal_sf", "parse_scenario_file",
    "read_pvalue_table", "refine_for_replicability", "simulate_rep",
    "step_up_set", "step_up_set_general_dep", "step_up_set_threshold_dep",
    "sweep_c2", "validate_dataset",
]
