"""Demand generation, compound growth, channelization and CO aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .routing import HomingEntry


class TrafficError(ValueError):
    pass


@dataclass(frozen=True)
class GrowthModel:
    annual_rate: float = 0.40
    horizon_years: int = 10

    def __post_init__(self) -> None:
        if self.annual_rate <= -1:
            raise TrafficError(f"annual rate must be > -1, got {self.annual_rate}")
        if self.horizon_years < 1:
            raise TrafficError(f"horizon must be >= 1, got {self.horizon_years}")


@dataclass(frozen=True)
class DemandSet:
    """Offered Gbps per leaf for one study year (1-based)."""

    demands_gbps: dict[str, float]
    year: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.year < 1:
            raise TrafficError(f"year must be >= 1, got {self.year}")
        for leaf, d in self.demands_gbps.items():
            if not d > 0:
                raise TrafficError(f"demand for {leaf!r} must be > 0, got {d}")

    def total_gbps(self) -> float:
        return math.fsum(self.demands_gbps.values())


def synth_demands(
    leaves: list[str],
    mean_gbps: float = 43.6,
    min_gbps: float = 10.5,
    max_gbps: float = 95.0,
    seed: int = 0,
) -> DemandSet:
    """Seeded per-leaf demands in [min, max] whose sample mean lands within
    2% of the target.

    Draws a truncated normal (sigma chosen so ~99% of the mass falls in
    range before clamping), then alternates rescale-and-clamp steps until
    the mean converges.
    """
    if not (min_gbps < mean_gbps < max_gbps):
        raise TrafficError(
            f"mean {mean_gbps} must lie strictly inside [{min_gbps}, {max_gbps}]"
        )
    if not leaves:
        raise TrafficError("no leaves given")
    rng = np.random.default_rng(seed)
    sigma = min(mean_gbps - min_gbps, max_gbps - mean_gbps) / 2.58
    vals = rng.normal(mean_gbps, sigma, size=len(leaves))
    vals = np.clip(vals, min_gbps, max_gbps)
    for _ in range(64):
        cur = vals.mean()
        if abs(cur - mean_gbps) <= 0.001 * mean_gbps:
            break
        vals = np.clip(vals * (mean_gbps / cur), min_gbps, max_gbps)
    demands = {leaf: float(v) for leaf, v in zip(sorted(leaves), vals)}
    return DemandSet(
        demands_gbps=demands,
        year=1,
        meta={"seed": seed, "mean_gbps": mean_gbps, "min_gbps": min_gbps, "max_gbps": max_gbps},
    )


def grow(d: DemandSet, m: GrowthModel, year: int) -> DemandSet:
    """Scale demands to a target year by compound annual growth.

    Growth is relative to the set's own year, so growing year-over-year
    composes exactly with growing straight from the base year.
    """
    if not (1 <= year <= m.horizon_years):
        raise TrafficError(f"year {year} outside [1, {m.horizon_years}]")
    factor = (1.0 + m.annual_rate) ** (year - d.year)
    return replace(
        d,
        demands_gbps={leaf: v * factor for leaf, v in d.demands_gbps.items()},
        year=year,
        meta={**d.meta, "growth_rate": m.annual_rate},
    )


def channels_needed(demand_gbps: float, channel_rate_gbps: float = 100.0) -> int:
    """Transceiver channels required for a demand: ceil(d / rate), min 1."""
    if not demand_gbps > 0:
        raise TrafficError(f"demand must be > 0, got {demand_gbps}")
    if not channel_rate_gbps > 0:
        raise TrafficError(f"channel rate must be > 0, got {channel_rate_gbps}")
    return max(1, math.ceil(demand_gbps / channel_rate_gbps))


@dataclass(frozen=True)
class CoAggregate:
    primary_gbps: float
    secondary_gbps: float

    @property
    def protected_gbps(self) -> float:
        """Primary plus full-rate protection copies (1+1 dual homing)."""
        return self.primary_gbps + self.secondary_gbps


def aggregate_co(
    demands: DemandSet, homing: dict[str, HomingEntry]
) -> dict[str, CoAggregate]:
    """Per-CO traffic sums over primary- and secondary-homed leaves.

    Conservation: the primary aggregates over all COs sum exactly to the
    leaf demand total (compensated summation).
    """
    primary: dict[str, list[float]] = {}
    secondary: dict[str, list[float]] = {}
    for leaf, d in demands.demands_gbps.items():
        entry = homing.get(leaf)
        if entry is None:
            raise TrafficError(f"leaf {leaf!r} has no homing assignment")
        primary.setdefault(entry.primary_co, []).append(d)
        secondary.setdefault(entry.secondary_co, []).append(d)
    cos = sorted(set(primary) | set(secondary))
    return {
        co: CoAggregate(
            primary_gbps=math.fsum(primary.get(co, ())),
            secondary_gbps=math.fsum(secondary.get(co, ())),
        )
        for co in cos
    }
