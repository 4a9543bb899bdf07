"""Equipment dimensioning per scenario and study year.

Access-to-metro rules, per 100G channel and per homing leg (the whole
chain is duplicated on the protection leg):

* Benchmark (gray optics + transponders): every channel takes a gray
  module pair on the feeder (leaf end + CO end; extended-reach modules
  when the feeder exceeds the long-reach limit).  On top of that the
  traditional hierarchy re-grooms traffic electrically at every tier
  boundary on the way to the core level: at each tier hop the CO's
  upstream demand is re-channelized at the grooming rate, and each
  groomed channel consumes an OEO gray pair plus a transponder, while
  each line-side trunk (trunk rate, default 400G) adds one more
  transponder as the mux stage.  Tier depth: HL3 = 0 hops, HL4 = 1,
  HL5 = 2.
* Point-to-point: one coherent pluggable at the leaf and one at the CO
  per channel; routers absorb aggregation, no transponders.
* Point-to-multipoint: one subcarrier leaf transceiver per channel;
  leaves attach through passive splitter groups, and each group is
  served by shared 400G hub transceivers at the CO, one hub per four
  channels (ceil).

Metro-core (identical across scenarios): per CO, protected demand is
channelized at 400G, each channel takes a coherent pluggable at both
path ends on both legs; switching nodes get one blade per nine line
ports (minimum one) and one multicast switch per sixteen add/drop
ports.

Installed base is cumulative: never removed, only extended.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .model import Level, NodeKind, Segment, Topology
from .routing import HomingEntry, MtcRoute
from .traffic import CoAggregate, DemandSet, channels_needed


class DimensioningError(ValueError):
    pass


class Scenario(str, Enum):
    BENCHMARK = "benchmark"
    PTP = "ptp"
    PTMP = "ptmp"


KIND_GRAY_LR = "gray_100g_lr"
KIND_GRAY_ER = "gray_100g_er"
KIND_TP = "tp_400g"
KIND_ZR100 = "zr_100g"
KIND_DSCM100 = "dscm_100g"
KIND_DSCM400 = "dscm_400g"
KIND_ZRP400 = "zrp_400g"
KIND_ROB = "rob"
KIND_MCS = "mcs"

SCENARIO_KINDS = {
    Scenario.BENCHMARK: {KIND_GRAY_LR, KIND_GRAY_ER, KIND_TP},
    Scenario.PTP: {KIND_ZR100},
    Scenario.PTMP: {KIND_DSCM100, KIND_DSCM400},
}

TIER_HOPS = {Level.HL3: 0, Level.HL4: 1, Level.HL5: 2}


@dataclass(frozen=True)
class Placement:
    node: str
    kind: str
    count: int
    year: int
    cause: str

    def __post_init__(self) -> None:
        if self.count < 1:
            raise DimensioningError(f"placement count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class DimensioningParams:
    channel_rate_gbps: float = 100.0
    protection_legs: int = 2
    gray_lr_max_km: float = 10.0
    groom_rate_gbps: float = 100.0
    trunk_rate_gbps: float = 400.0
    splitter_fanout: int = 4
    hub_clients: int = 4
    mtc_channel_rate_gbps: float = 400.0
    rob_ports_per_blade: int = 9
    mcs_port_group: int = 16

    def __post_init__(self) -> None:
        if self.protection_legs not in (1, 2):
            raise DimensioningError("protection_legs must be 1 or 2")


class BuildPlan:
    """Cumulative equipment placements per year for one scenario."""

    def __init__(self, scenario: Scenario) -> None:
        self.scenario = scenario
        self._by_year: dict[int, list[Placement]] = {}

    def add_year(self, year: int, placements: list[Placement]) -> None:
        if year in self._by_year:
            raise DimensioningError(f"year {year} already planned")
        self._by_year[year] = sorted(placements, key=lambda p: (p.node, p.kind, p.cause))

    def years(self) -> list[int]:
        return sorted(self._by_year)

    def placements(self, year: int) -> list[Placement]:
        """Cumulative installed base through the given year (running max
        per (node, kind), never removed)."""
        best: dict[tuple[str, str], int] = {}
        cause: dict[tuple[str, str], str] = {}
        first_year: dict[tuple[str, str], int] = {}
        for y in self.years():
            if y > year:
                break
            counts: dict[tuple[str, str], int] = {}
            for p in self._by_year[y]:
                key = (p.node, p.kind)
                counts[key] = counts.get(key, 0) + p.count
                cause.setdefault(key, p.cause)
                first_year.setdefault(key, y)
            for key, cnt in counts.items():
                if cnt > best.get(key, 0):
                    best[key] = cnt
        return [
            Placement(node=n, kind=k, count=c, year=first_year[(n, k)], cause=cause[(n, k)])
            for (n, k), c in sorted(best.items())
        ]


def _gray_kind(feeder_km: float, params: DimensioningParams) -> str:
    return KIND_GRAY_ER if feeder_km > params.gray_lr_max_km else KIND_GRAY_LR


def _legs(entry: HomingEntry, params: DimensioningParams):
    legs = [("primary", entry.primary_co, entry.primary_km)]
    if params.protection_legs == 2:
        legs.append(("secondary", entry.secondary_co, entry.secondary_km))
    return legs


def dimension_atm(
    topology: Topology,
    demands: DemandSet,
    homing: dict[str, HomingEntry],
    scenario: Scenario,
    year: int,
    params: DimensioningParams | None = None,
) -> list[Placement]:
    """Access-segment placements for one scenario and year."""
    params = params or DimensioningParams()
    out: list[Placement] = []

    # per-(CO, leg) rollups used by the shared stages
    leg_demand: dict[tuple[str, str], float] = {}
    leg_leaf_channels: dict[tuple[str, str], list[tuple[str, int]]] = {}

    for leaf in sorted(demands.demands_gbps):
        entry = homing.get(leaf)
        if entry is None:
            raise DimensioningError(f"leaf {leaf!r} is not homed")
        demand = demands.demands_gbps[leaf]
        ch = channels_needed(demand, params.channel_rate_gbps)
        for leg, co, feeder_km in _legs(entry, params):
            leg_demand[(co, leg)] = leg_demand.get((co, leg), 0.0) + demand
            leg_leaf_channels.setdefault((co, leg), []).append((leaf, ch))
            cause = f"{leaf}/{leg}"
            if scenario is Scenario.BENCHMARK:
                gray = _gray_kind(feeder_km, params)
                out.append(Placement(leaf, gray, ch, year, cause))
                out.append(Placement(co, gray, ch, year, cause))
            elif scenario is Scenario.PTP:
                out.append(Placement(leaf, KIND_ZR100, ch, year, cause))
                out.append(Placement(co, KIND_ZR100, ch, year, cause))
            else:
                out.append(Placement(leaf, KIND_DSCM100, ch, year, cause))

    if scenario is Scenario.BENCHMARK:
        for (co, leg) in sorted(leg_demand):
            hops = TIER_HOPS[topology.node(co).level]
            if hops == 0:
                continue
            demand = leg_demand[(co, leg)]
            groomed = math.ceil(demand / params.groom_rate_gbps)
            trunks = math.ceil(demand / params.trunk_rate_gbps)
            cause = f"aggregation:{co}/{leg}"
            per_hop_tp = groomed + trunks
            out.append(Placement(co, KIND_GRAY_LR, 2 * groomed * hops, year, cause))
            out.append(Placement(co, KIND_TP, per_hop_tp * hops, year, cause))
    elif scenario is Scenario.PTMP:
        for (co, leg) in sorted(leg_leaf_channels):
            leaves = sorted(leg_leaf_channels[(co, leg)])
            for g0 in range(0, len(leaves), params.splitter_fanout):
                group = leaves[g0 : g0 + params.splitter_fanout]
                group_ch = sum(ch for _, ch in group)
                hubs = math.ceil(group_ch / params.hub_clients)
                cause = f"hub:{co}/{leg}/g{g0 // params.splitter_fanout}"
                out.append(Placement(co, KIND_DSCM400, hubs, year, cause))

    return out


@dataclass(frozen=True)
class MtcInfeasibility:
    co: str
    leg: str
    reason: str


def dimension_mtc(
    topology: Topology,
    co_aggregates: dict[str, CoAggregate],
    mtc_routes: dict[str, MtcRoute],
    year: int,
    params: DimensioningParams | None = None,
) -> list[Placement]:
    """Metro-core placements from protected per-CO aggregates and routes.

    The caller is responsible for QoT-gating the routes; only feasible
    routes belong in ``mtc_routes``.
    """
    params = params or DimensioningParams()
    out: list[Placement] = []
    add_drop_ports: dict[str, int] = {}

    for co in sorted(mtc_routes):
        route = mtc_routes[co]
        agg = co_aggregates.get(co)
        if agg is None or agg.protected_gbps <= 0:
            continue
        ch400 = math.ceil(agg.protected_gbps / params.mtc_channel_rate_gbps)
        cause = f"uplink:{co}->{route.hl3}"
        # one pluggable per channel at each path end, on every protection leg
        per_end = params.protection_legs * ch400
        out.append(Placement(co, KIND_ZRP400, per_end, year, cause))
        out.append(Placement(route.hl3, KIND_ZRP400, per_end, year, cause))
        add_drop_ports[co] = add_drop_ports.get(co, 0) + per_end
        add_drop_ports[route.hl3] = add_drop_ports.get(route.hl3, 0) + per_end

    roadm_nodes = sorted(
        nid for nid, n in topology.nodes.items()
        if n.kind is NodeKind.CO and topology.links_of(nid, Segment.MTC)
    )
    for node in roadm_nodes:
        line_degree = len(topology.links_of(node, Segment.MTC))
        blades = max(1, math.ceil(line_degree / params.rob_ports_per_blade))
        out.append(Placement(node, KIND_ROB, blades, year, f"roadm:{node}"))
        ports = add_drop_ports.get(node, 0)
        if ports > 0:
            mcs = math.ceil(ports / params.mcs_port_group)
            out.append(Placement(node, KIND_MCS, mcs, year, f"adddrop:{node}"))

    return out


def element_count(placements: list[Placement]) -> dict[str, int]:
    """Cumulative unit counts by equipment kind, plus a grand total."""
    counts: dict[str, int] = {}
    for p in placements:
        counts[p.kind] = counts.get(p.kind, 0) + p.count
    counts["total"] = sum(counts.values())
    return counts


def relative_difference_pct(larger: float, smaller: float) -> float:
    """(A - B) / A * 100; the element-count comparison convention."""
    if larger == 0:
        raise DimensioningError("cannot take a relative difference of a zero baseline")
    return (larger - smaller) / larger * 100.0


def check_scenario_kinds(placements: list[Placement], scenario: Scenario) -> None:
    """Scenario exclusivity: reject kinds foreign to the scenario."""
    allowed = SCENARIO_KINDS[scenario]
    for p in placements:
        if p.kind not in allowed:
            raise DimensioningError(
                f"{p.kind} placed at {p.node} is not valid in scenario {scenario.value}"
            )
