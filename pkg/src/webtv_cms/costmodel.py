"""Normalized operation-cost model for three-screen content delivery.

Compares two orchestration styles over a Zipf-ranked content catalog:

* CANSS — the conventional syndication pipeline that pre-encodes every
  device variant at aggregation time, so one aggregation is billed for the
  whole aggregate/mediate/deploy bundle per target screen.
* Proposed — the user-driven scheme where aggregation, mediation, and
  deployment each run on demand and are billed individually.

All costs are dimensionless, normalized so a full single-screen pipeline
sums to 1.0. Rank popularity follows P_r = C / r^delta.
"""

from __future__ import annotations

import csv
import enum
import functools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

from .errors import ValidationError


@dataclass(frozen=True)
class CostParams:
    """Catalog size, subscriber count, and the normalized cost constants.

    Defaults are the reference configuration: mediation dominates
    (c_med = 0.7) and the per-transition load split is alpha (PC->iPad) 0.5,
    beta (PC->iPhone) 0.3, gamma (iPad->iPhone) 0.2.
    """

    n_content: int = 1000
    subscribers: int = 10000
    delta: float = 0.271
    c_agg: float = 0.2
    c_med: float = 0.7
    c_dep: float = 0.1
    alpha: float = 0.5
    beta: float = 0.3
    gamma: float = 0.2
    idle_cost: float = 0.1

    def __post_init__(self) -> None:
        if self.n_content < 1:
            raise ValidationError(f"content count must be >= 1, got {self.n_content}")
        if self.subscribers < 0:
            raise ValidationError("subscriber count must be >= 0")
        if self.delta < 0:
            raise ValidationError("Zipf exponent must be >= 0")
        for name in ("c_agg", "c_med", "c_dep", "alpha", "beta", "gamma", "idle_cost"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.alpha + self.beta + self.gamma > 1.0 + 1e-9:
            raise ValidationError("mediation load shares must sum to at most 1")


class SystemKind(str, enum.Enum):
    CANSS = "canss"
    PROPOSED = "proposed"


SCENARIOS = (1, 2, 3)


def _check_scenario(i: int) -> None:
    if i not in SCENARIOS:
        raise ValidationError(f"scenario index must be one of {SCENARIOS}, got {i}")


@functools.lru_cache(maxsize=256)
def zipf_constant(n_content: int, delta: float) -> float:
    """Normalizer C = 1 / sum_{r=1..N} r^-delta, so rank probabilities sum to 1."""
    if n_content < 1:
        raise ValidationError(f"content count must be >= 1, got {n_content}")
    return 1.0 / math.fsum(r ** -delta for r in range(1, n_content + 1))


def access_probability(rank: int, params: CostParams) -> float:
    """P_r = C / r^delta; strictly decreasing in rank for delta > 0."""
    if not 1 <= rank <= params.n_content:
        raise ValidationError(f"rank must be in 1..{params.n_content}, got {rank}")
    return zipf_constant(params.n_content, params.delta) / rank ** params.delta


def scenario_cost(system: SystemKind, i: int, params: CostParams) -> float:
    """Normalized cost of serving scenario bundle i on the given system.

    Scenario bundles grow cumulatively: i=1 covers the iPad->iPhone
    transition only, i=2 adds PC->iPhone, i=3 adds PC->iPad. CANSS repeats
    the full pipeline per covered screen; the proposed scheme aggregates and
    mediates once, paying only extra deployments.
    """
    _check_scenario(i)
    shares = {1: params.gamma, 2: params.beta + params.gamma,
              3: params.alpha + params.beta + params.gamma}[i]
    if system is SystemKind.CANSS:
        return i * (params.c_agg + params.c_med * shares + params.c_dep)
    return params.c_agg + params.c_med * shares + params.c_dep * i


def cost_mass(rank: int, system: SystemKind, i: int, params: CostParams) -> float:
    """Expected cost contributed by one rank: P_r * U * scenario cost."""
    return access_probability(rank, params) * params.subscribers * scenario_cost(system, i, params)


def cumulative_cost(rank_bound: int, system: SystemKind, i: int, params: CostParams) -> float:
    """Sum of cost_mass over ranks 1..rank_bound, compensated accumulation."""
    if not 1 <= rank_bound <= params.n_content:
        raise ValidationError(
            f"rank bound must be in 1..{params.n_content}, got {rank_bound}"
        )
    constant = zipf_constant(params.n_content, params.delta)
    unit = params.subscribers * scenario_cost(system, i, params)
    return math.fsum(constant / r ** params.delta * unit for r in range(1, rank_bound + 1))


class Operation(str, enum.Enum):
    AGGREGATION = "agg"
    MEDIATION_ALPHA = "med-alpha"
    MEDIATION_BETA = "med-beta"
    MEDIATION_GAMMA = "med-gamma"
    DEPLOYMENT = "dep"


_MEDIATION_SHARE_FIELD = {
    Operation.MEDIATION_ALPHA: "alpha",
    Operation.MEDIATION_BETA: "beta",
    Operation.MEDIATION_GAMMA: "gamma",
}


@dataclass(frozen=True)
class TimelineEvent:
    time: int
    operation: Operation

    def __post_init__(self) -> None:
        if self.time < 0:
            raise ValidationError(f"event time must be >= 0, got {self.time}")


def _event_cost(event: TimelineEvent, params: CostParams) -> float:
    if event.operation is Operation.AGGREGATION:
        return params.c_agg
    if event.operation is Operation.DEPLOYMENT:
        return params.c_dep
    return params.c_med * getattr(params, _MEDIATION_SHARE_FIELD[event.operation])


def simulate_timeline(
    events: Iterable[TimelineEvent],
    system: SystemKind,
    horizon: int,
    params: CostParams,
) -> list[tuple[int, float]]:
    """Server cost per step over [0, horizon); every step carries the idle cost.

    Proposed bills each event's own operation at its own step. CANSS bills
    the whole pipeline at the aggregation step: the aggregation event is
    charged c_agg + c_med * (shares of the mediation events it bundles)
    + c_dep, and the bundled mediation/deployment events add nothing.
    An event bundles with the most recent aggregation at or before it;
    events with no preceding aggregation are billed at their own step.
    """
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    ordered = sorted(
        events, key=lambda e: (e.time, 0 if e.operation is Operation.AGGREGATION else 1)
    )
    for event in ordered:
        if event.time >= horizon:
            raise ValidationError(
                f"event at step {event.time} is beyond horizon {horizon}"
            )
    additions = [0.0] * horizon
    if system is SystemKind.PROPOSED:
        for event in ordered:
            additions[event.time] += _event_cost(event, params)
    else:
        current_agg_step: int | None = None
        for event in ordered:
            if event.operation is Operation.AGGREGATION:
                current_agg_step = event.time
                additions[event.time] += params.c_agg + params.c_dep
            elif current_agg_step is None:
                additions[event.time] += _event_cost(event, params)
            elif event.operation is not Operation.DEPLOYMENT:
                additions[current_agg_step] += _event_cost(event, params)
    return [(step, params.idle_cost + additions[step]) for step in range(horizon)]


def format_cost(value: float) -> str:
    """Nine significant digits; the stable CSV number format."""
    return f"{value:.9g}"


EXPERIMENT_HEADER = ("rank", "system", "scenario", "cost_mass", "cumulative_cost")


def run_cost_experiment(params: CostParams, out: IO[str] | Path | str) -> int:
    """Emit the full rank-by-rank cost table as CSV; returns the data row count.

    Rows are ordered system-major, then scenario, then ascending rank, with
    LF line endings, so equal parameters always produce identical bytes.
    """
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            return run_cost_experiment(params, fh)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(EXPERIMENT_HEADER)
    constant = zipf_constant(params.n_content, params.delta)
    rows = 0
    for system in (SystemKind.CANSS, SystemKind.PROPOSED):
        for i in SCENARIOS:
            unit = params.subscribers * scenario_cost(system, i, params)
            running: list[float] = []
            for rank in range(1, params.n_content + 1):
                mass = constant / rank ** params.delta * unit
                running.append(mass)
                writer.writerow(
                    (rank, system.value, i, format_cost(mass), format_cost(math.fsum(running)))
                )
                rows += 1
    return rows


def scenario_totals(params: CostParams) -> dict[tuple[str, int], float]:
    """Cumulative cost at the full catalog for all six (system, scenario) pairs."""
    return {
        (system.value, i): cumulative_cost(params.n_content, system, i, params)
        for system in (SystemKind.CANSS, SystemKind.PROPOSED)
        for i in SCENARIOS
    }
