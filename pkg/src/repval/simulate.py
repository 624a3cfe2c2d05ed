"""Monte Carlo harness: generate two-study normal data, run the full
selection + r-value pipeline, and estimate FDR, FWER and power.

Generative model per repetition: the m features split into four blocks
(null in both studies, signal in follow-up only, signal in primary only,
signal in both). Primary z-scores get a mean shift mu1 on primary-signal
features, chosen so a Bonferroni test at 0.05/m has power pi1; features are
selected for follow-up by BH at level c1(q)*q on the primary p-values;
follow-up z-scores for the R1 selected features get a mean shift mu2 chosen
so a Bonferroni test at 0.05/R1 has power pi2 (R1 is the realised selection
count, so mu2 varies across repetitions). P-values are one-sided upper-tail.

A claim is true iff the feature has signal in both studies. Estimated FDR
is the mean false discovery proportion; average power is the mean count of
true claims divided by m*f11; "power for at least one" is the fraction of
repetitions with any true claim; FWER is the fraction with any false claim.

Every repetition draws from its own counter-derived stream
(seed, rep_index), so results are bitwise reproducible no matter how
repetitions are scheduled, and paired procedure comparisons see identical
data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from .model import AnalysisConfig
from .normal import normal_quantile, normal_sf
from .rvalue import _step_up_mask, c1
from .selection import bh_reject

__all__ = [
    "SimulationScenario", "SimulationMetrics", "RepOutcome",
    "simulate_rep", "estimate", "sweep_c2", "compare_baseline",
    "parse_scenario_file", "scenario_from_mapping", "METRICS_CSV_HEADER",
    "metrics_csv_row", "write_metrics_csv",
]

_POWER_CALIBRATION_ALPHA = 0.05  # Bonferroni level defining pi1/pi2


@dataclass(frozen=True)
class SimulationScenario:
    """Generative model plus analysis parameters for one simulation cell."""

    pi1: float
    pi2: float
    seed: int
    m: int = 1000
    f00: float = 0.9
    f01: float = 0.025
    f10: float = 0.025
    f11: float = 0.05
    l00: float = 0.8
    c2: float = 0.5
    q: float = 0.05
    reps: int = 10000
    rho: float = 0.0       # equicorrelation within primary-study blocks
    block_size: int = 1
    scenario_id: str = ""

    def __post_init__(self):
        total = self.f00 + self.f01 + self.f10 + self.f11
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"fractions sum to {total!r}, not 1")
        for name in ("f00", "f01", "f10", "f11"):
            frac = getattr(self, name)
            if frac < 0.0:
                raise ValueError(f"{name} must be nonnegative")
            count = frac * self.m
            if abs(count - round(count)) > 1e-9:
                raise ValueError(f"{name} * m = {count} is not an integer")
        for name in ("pi1", "pi2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")
        if not 0.0 <= self.l00 < 1.0:
            raise ValueError("l00 must lie in [0, 1)")
        if not 0.0 < self.c2 < 1.0:
            raise ValueError("c2 must lie in (0, 1)")
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must lie in (0, 1)")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (round(self.f00 * self.m), round(self.f01 * self.m),
                round(self.f10 * self.m), round(self.f11 * self.m))

    @property
    def analysis_config(self) -> AnalysisConfig:
        return AnalysisConfig(m=self.m, l00=self.l00, c2=self.c2)


@dataclass(frozen=True)
class SimulationMetrics:
    """Aggregated estimates; SE = sample SD / sqrt(reps)."""

    reps: int
    fdr_hat: float
    se_fdr: float
    avg_power: float
    se_power: float
    p_at_least_one: float
    se_palo: float
    fwer_hat: float
    se_fwer: float
    mean_claims: float
    mean_r1: float


@dataclass(frozen=True)
class RepOutcome:
    r1: int
    n_claims: int
    n_true: int

    @property
    def n_false(self) -> int:
        return self.n_claims - self.n_true

    @property
    def fdp(self) -> float:
        return self.n_false / max(self.n_claims, 1)


def _rep_generator(seed: int, rep_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(rep_index,))
    return np.random.Generator(np.random.Philox(ss))


def _mu1(scenario: SimulationScenario) -> float:
    a = _POWER_CALIBRATION_ALPHA
    return (normal_quantile(1.0 - a / scenario.m)
            - normal_quantile(1.0 - scenario.pi1))


def _mu2(scenario: SimulationScenario, r1: int) -> float:
    a = _POWER_CALIBRATION_ALPHA
    return (normal_quantile(1.0 - a / r1)
            - normal_quantile(1.0 - scenario.pi2))


def _primary_noise(scenario: SimulationScenario,
                   rng: np.random.Generator) -> np.ndarray:
    m = scenario.m
    if scenario.rho == 0.0 or scenario.block_size == 1:
        return rng.standard_normal(m)
    nblocks = math.ceil(m / scenario.block_size)
    shared = np.repeat(rng.standard_normal(nblocks), scenario.block_size)[:m]
    own = rng.standard_normal(m)
    return math.sqrt(scenario.rho) * shared + math.sqrt(1.0 - scenario.rho) * own


def _simulate_claims(scenario: SimulationScenario, rng: np.random.Generator,
                     procedures: Sequence[str]) -> dict[str, RepOutcome]:
    n00, n01, n10, n11 = scenario.counts
    m = scenario.m
    signal1 = np.zeros(m, dtype=bool)
    signal1[n00 + n01:] = True                  # primary-signal block
    signal2 = np.zeros(m, dtype=bool)
    signal2[n00:n00 + n01] = True               # follow-up-only block
    signal2[n00 + n01 + n10:] = True            # both-studies block
    truth11 = np.zeros(m, dtype=bool)
    truth11[n00 + n01 + n10:] = True

    x1 = _primary_noise(scenario, rng)
    if signal1.any():
        x1 = x1 + np.where(signal1, _mu1(scenario), 0.0)
    p1 = normal_sf(x1)

    c1_at_q = c1(scenario.q, scenario.l00, scenario.c2)
    selected = bh_reject(p1, c1_at_q * scenario.q)
    r1 = len(selected)
    if r1 == 0:
        return {proc: RepOutcome(0, 0, 0) for proc in procedures}

    x2 = rng.standard_normal(r1)
    sel_signal2 = signal2[selected]
    if sel_signal2.any():
        x2 = x2 + np.where(sel_signal2, _mu2(scenario, r1), 0.0)
    p2 = normal_sf(x2)
    p1_sel = p1[selected]
    sel_truth = truth11[selected]

    out: dict[str, RepOutcome] = {}
    for proc in procedures:
        if proc == "step-up":
            mask = _step_up_mask(p1_sel, p2, m_eff=float(m), c2=scenario.c2,
                                 c1_at_q=c1_at_q, q=scenario.q)
        elif proc == "bonferroni":
            alpha = scenario.q
            c1_at_a = c1(alpha, scenario.l00, scenario.c2)
            mask = ((p1_sel <= c1_at_a * alpha / m)
                    & (p2 <= scenario.c2 * alpha / r1))
        elif proc == "max-p-bh":
            maxp = np.concatenate([np.maximum(p1_sel, p2),
                                   np.ones(m - r1)])
            rej = bh_reject(maxp, scenario.q / (1.0 - scenario.l00))
            mask = np.zeros(r1, dtype=bool)
            mask[rej[rej < r1]] = True
        else:
            raise ValueError(f"unknown procedure {proc!r}")
        out[proc] = RepOutcome(r1, int(mask.sum()),
                               int((mask & sel_truth).sum()))
    return out


def simulate_rep(scenario: SimulationScenario, rep_index: int,
                 procedure: str = "step-up") -> RepOutcome:
    """Outcome of a single repetition; deterministic in (seed, rep_index)."""
    rng = _rep_generator(scenario.seed, rep_index)
    return _simulate_claims(scenario, rng, (procedure,))[procedure]


def _aggregate(scenario: SimulationScenario,
               outcomes: Sequence[RepOutcome]) -> SimulationMetrics:
    reps = len(outcomes)
    n11 = scenario.counts[3]
    fdp = np.array([o.fdp for o in outcomes])
    power = (np.array([o.n_true for o in outcomes]) / (n11 if n11 else 1)
             if n11 else np.zeros(reps))
    palo = np.array([1.0 if o.n_true > 0 else 0.0 for o in outcomes])
    fwer = np.array([1.0 if o.n_false > 0 else 0.0 for o in outcomes])
    claims = np.array([o.n_claims for o in outcomes], dtype=float)
    r1s = np.array([o.r1 for o in outcomes], dtype=float)

    def se(v: np.ndarray) -> float:
        return float(v.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0

    return SimulationMetrics(
        reps=reps,
        fdr_hat=float(fdp.mean()), se_fdr=se(fdp),
        avg_power=float(power.mean()), se_power=se(power),
        p_at_least_one=float(palo.mean()), se_palo=se(palo),
        fwer_hat=float(fwer.mean()), se_fwer=se(fwer),
        mean_claims=float(claims.mean()), mean_r1=float(r1s.mean()),
    )


def estimate(scenario: SimulationScenario,
             procedure: str = "step-up") -> SimulationMetrics:
    """Run all repetitions serially and aggregate."""
    outcomes = [simulate_rep(scenario, rep, procedure)
                for rep in range(scenario.reps)]
    return _aggregate(scenario, outcomes)


def sweep_c2(scenario: SimulationScenario, c2_grid: Iterable[float],
             procedure: str = "step-up") -> list[tuple[float, SimulationMetrics]]:
    """One metrics row per grid point, holding everything else fixed."""
    return [(float(c2v), estimate(replace(scenario, c2=float(c2v)), procedure))
            for c2v in c2_grid]


def compare_baseline(scenario: SimulationScenario) -> dict[str, SimulationMetrics]:
    """Step-up r-value procedure vs BH on maximum p-values, on identical
    draws (paired repetition by repetition)."""
    procs = ("step-up", "max-p-bh")
    per_proc: dict[str, list[RepOutcome]] = {p: [] for p in procs}
    for rep in range(scenario.reps):
        rng = _rep_generator(scenario.seed, rep)
        outcomes = _simulate_claims(scenario, rng, procs)
        for p in procs:
            per_proc[p].append(outcomes[p])
    return {p: _aggregate(scenario, per_proc[p]) for p in procs}


# --- scenario files and metrics CSV ----------------------------------------

_SCENARIO_FIELDS = {
    "pi1": float, "pi2": float, "seed": int, "m": int,
    "f00": float, "f01": float, "f10": float, "f11": float,
    "l00": float, "c2": float, "q": float, "reps": int,
    "rho": float, "block_size": int, "scenario_id": str,
}


def scenario_from_mapping(mapping: dict) -> SimulationScenario:
    kwargs = {}
    for key, raw in mapping.items():
        if key not in _SCENARIO_FIELDS:
            raise ValueError(f"unknown scenario field {key!r}")
        kwargs[key] = _SCENARIO_FIELDS[key](raw)
    for required in ("pi1", "pi2", "seed"):
        if required not in kwargs:
            raise ValueError(f"scenario is missing required field {required!r}")
    return SimulationScenario(**kwargs)


def parse_scenario_file(source) -> SimulationScenario:
    """Plain key = value lines mirroring the scenario fields; # comments."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        mapping[key.strip()] = value.strip()
    return scenario_from_mapping(mapping)


METRICS_CSV_HEADER = ("scenario_id,c2,l00,pi1,pi2,fdr_hat,se_fdr,"
                      "avg_power,se_power,p_at_least_one,se_palo")


def metrics_csv_row(scenario: SimulationScenario,
                    metrics: SimulationMetrics) -> str:
    return ",".join([
        scenario.scenario_id,
        f"{scenario.c2:.6g}", f"{scenario.l00:.6g}",
        f"{scenario.pi1:.6g}", f"{scenario.pi2:.6g}",
        f"{metrics.fdr_hat:.6f}", f"{metrics.se_fdr:.6f}",
        f"{metrics.avg_power:.6f}", f"{metrics.se_power:.6f}",
        f"{metrics.p_at_least_one:.6f}", f"{metrics.se_palo:.6f}",
    ])


def write_metrics_csv(rows: Sequence[tuple[SimulationScenario, SimulationMetrics]],
                      out: TextIO) -> None:
    out.write(METRICS_CSV_HEADER + "\n")
    for scenario, metrics in rows:
        out.write(metrics_csv_row(scenario, metrics) + "\n")
