"""Multi-year, multi-scenario study driver and report emitter.

Pipeline per scenario and year: grow demands, verify feeder and
lightpath QoT, dimension both segments, and roll equipment into the
cumulative build plan.  Nothing is counted for a demand whose QoT
verdict failed; failures land in an explicit manifest instead.

Determinism contract: a fixed (config, seed) pair produces
byte-identical report files, regardless of the worker count used to
evaluate scenarios.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from . import ledger as ledger_mod
from .dimensioning import (
    BuildPlan,
    DimensioningParams,
    Scenario,
    dimension_atm,
    dimension_mtc,
    element_count,
)
from .ledger import Catalog, CostPowerReport, load_catalog
from .model import Level, NodeKind, Segment, Topology, load_topology, topology_stats
from .qot import (
    AmpModel,
    AtmChannelPlan,
    AtmScenario,
    MarginModel,
    MtcChannelPlan,
    gsnr_path,
    osnr_atm,
    path_spans,
    reach_feasible,
)
from .routing import HomingEntry, MtcRoute, NoDisjointPair, Unreachable, dual_home_all, mtc_route
from .synth import SynthParams, synth_reference
from .traffic import DemandSet, GrowthModel, aggregate_co, grow, synth_demands

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrafficParams:
    mean_gbps: float = 43.6
    min_gbps: float = 10.5
    max_gbps: float = 95.0


@dataclass(frozen=True)
class QotParams:
    amp: AmpModel = field(default_factory=AmpModel)
    margins: MarginModel = field(default_factory=MarginModel)
    atm_plan: AtmChannelPlan = field(default_factory=lambda: AtmChannelPlan(fanout=4))
    mtc_plan: MtcChannelPlan = field(default_factory=MtcChannelPlan)
    max_span_km: float = 80.0
    isrs_tilt_db_per_thz: float = 0.5


@dataclass(frozen=True)
class StudyConfig:
    topology_path: str | None = None
    synth: SynthParams = field(default_factory=SynthParams)
    traffic: TrafficParams = field(default_factory=TrafficParams)
    growth: GrowthModel = field(default_factory=GrowthModel)
    scenarios: tuple[Scenario, ...] = (Scenario.BENCHMARK, Scenario.PTP, Scenario.PTMP)
    horizon_years: int = 10
    qot: QotParams = field(default_factory=QotParams)
    dimensioning: DimensioningParams = field(default_factory=DimensioningParams)
    catalog_path: str | None = None
    seed: int = 1
    workers: int = 1

    def __post_init__(self) -> None:
        if self.horizon_years < 1:
            raise ConfigError("horizon must be >= 1 year")
        if self.horizon_years > self.growth.horizon_years:
            raise ConfigError("horizon exceeds the growth model horizon")
        if len(self.scenarios) != len(set(self.scenarios)):
            raise ConfigError("duplicate scenarios in config")


@dataclass(frozen=True)
class QotFailure:
    scenario: str
    year: int
    segment: str
    subject: str
    limiting: str
    detail: str


@dataclass
class ScenarioResult:
    scenario: Scenario
    plan_atm: BuildPlan
    plan_mtc: BuildPlan
    reports: dict[tuple[str, int], CostPowerReport]
    element_counts: dict[int, dict[str, int]]
    failures: list[QotFailure]


@dataclass
class StudyResult:
    config: StudyConfig
    topology: Topology
    scenario_results: dict[Scenario, ScenarioResult]
    failures: list[QotFailure]

    def report(self, scenario: Scenario, segment: str, year: int) -> CostPowerReport:
        return self.scenario_results[scenario].reports[(segment, year)]

    def elements(self, scenario: Scenario, year: int) -> dict[str, int]:
        return self.scenario_results[scenario].element_counts[year]


def _load_or_synth_topology(cfg: StudyConfig) -> Topology:
    if cfg.topology_path:
        with open(cfg.topology_path, "r", encoding="utf-8") as fh:
            return load_topology(fh.read())
    return synth_reference(cfg.synth)


def _atm_scenario(scenario: Scenario) -> AtmScenario | None:
    if scenario is Scenario.PTP:
        return AtmScenario.PTP
    if scenario is Scenario.PTMP:
        return AtmScenario.PTMP
    return None


def _gate_atm(
    topology: Topology,
    homing: dict[str, HomingEntry],
    scenario: Scenario,
    cfg: StudyConfig,
    catalog: Catalog,
    year: int,
    failures: list[QotFailure],
) -> dict[str, HomingEntry]:
    """Feeder QoT/reach gate; drops leaves whose any leg fails."""
    kind = {Scenario.BENCHMARK: None, Scenario.PTP: "zr_100g", Scenario.PTMP: "dscm_100g"}[scenario]
    atm_kind = _atm_scenario(scenario)
    ok: dict[str, HomingEntry] = {}
    for leaf in sorted(homing):
        entry = homing[leaf]
        good = True
        for leg, feeder_km in (("primary", entry.primary_km), ("secondary", entry.secondary_km)):
            if scenario is Scenario.BENCHMARK:
                # gray client optics: distance-gated only (ER covers the cap)
                er = catalog["gray_100g_er"]
                if er.reach_km is not None and feeder_km > er.reach_km:
                    good = False
                    failures.append(QotFailure(scenario.value, year, "atm", f"{leaf}/{leg}",
                                               "reach", f"feeder {feeder_km:.2f} km"))
                continue
            entry_cat = catalog[kind]
            fanout = cfg.qot.atm_plan.fanout if scenario is Scenario.PTMP else 1
            qot = osnr_atm(
                feeder_km,
                fanout,
                cfg.qot.atm_plan,
                cfg.qot.amp,
                atm_kind,
                cfg.qot.margins,
                threshold_db=entry_cat.snr_threshold_db or 0.0,
            )
            verdict = reach_feasible(feeder_km, entry_cat.reach_km, qot)
            if not verdict.feasible:
                good = False
                failures.append(QotFailure(scenario.value, year, "atm", f"{leaf}/{leg}",
                                           verdict.limiting or "snr",
                                           f"feeder {feeder_km:.2f} km"))
        if good:
            ok[leaf] = entry
    return ok


def _gate_mtc_routes(
    topology: Topology,
    cfg: StudyConfig,
    catalog: Catalog,
    failures: list[QotFailure],
) -> dict[str, MtcRoute]:
    """LAND routes CO -> nearest HL3 with per-leg GSNR and reach gates."""
    hl3s = [nid for nid in topology.co_ids() if topology.node(nid).level is Level.HL3]
    zrp = catalog["zrp_400g"]
    routes: dict[str, MtcRoute] = {}
    for co in topology.co_ids():
        if topology.node(co).level is Level.HL3:
            continue
        if not topology.links_of(co, Segment.MTC):
            continue
        try:
            route = mtc_route(topology, co, hl3s)
        except (NoDisjointPair, Unreachable) as exc:
            failures.append(QotFailure("all", 0, "mtc", co, "routing", str(exc)))
            continue
        legs_ok = True
        for leg_name, path in (("primary", route.pair.primary), ("secondary", route.pair.secondary)):
            spans = path_spans(path, topology.fibers, cfg.qot.max_span_km)
            wss_stages = max(0, len(path.nodes) - 2)
            qot = gsnr_path(
                spans,
                cfg.qot.mtc_plan,
                cfg.qot.amp,
                cfg.qot.margins,
                wss_stages=wss_stages,
                tilt_db_per_thz=cfg.qot.isrs_tilt_db_per_thz,
                threshold_db=zrp.snr_threshold_db or 0.0,
            )
            verdict = reach_feasible(path.length_km, zrp.reach_km, qot)
            if not verdict.feasible:
                legs_ok = False
                failures.append(QotFailure("all", 0, "mtc", f"{co}/{leg_name}",
                                           verdict.limiting or "snr",
                                           f"{path.length_km:.1f} km, "
                                           f"gsnr {qot.value_db:.2f} dB"))
        if legs_ok:
            routes[co] = route
    return routes


def _run_scenario(
    scenario: Scenario,
    topology: Topology,
    homing: dict[str, HomingEntry],
    base_demands: DemandSet,
    mtc_routes: dict[str, MtcRoute],
    cfg: StudyConfig,
    catalog: Catalog,
) -> ScenarioResult:
    plan_atm = BuildPlan(scenario)
    plan_mtc = BuildPlan(scenario)
    reports: dict[tuple[str, int], CostPowerReport] = {}
    element_counts: dict[int, dict[str, int]] = {}
    failures: list[QotFailure] = []

    for year in range(1, cfg.horizon_years + 1):
        demands = grow(base_demands, cfg.growth, year)
        homed = _gate_atm(topology, homing, scenario, cfg, catalog, year, failures)
        gated_demands = DemandSet(
            demands_gbps={l: d for l, d in demands.demands_gbps.items() if l in homed},
            year=year,
            meta=demands.meta,
        )
        atm = dimension_atm(topology, gated_demands, homed, scenario, year, cfg.dimensioning)
        plan_atm.add_year(year, atm)

        aggregates = aggregate_co(gated_demands, homed)
        mtc = dimension_mtc(topology, aggregates, mtc_routes, year, cfg.dimensioning)
        plan_mtc.add_year(year, mtc)

        atm_cum = plan_atm.placements(year)
        mtc_cum = plan_mtc.placements(year)
        reports[("atm", year)] = ledger_mod.report(atm_cum, catalog, "atm", scenario.value, year)
        reports[("mtc", year)] = ledger_mod.report(mtc_cum, catalog, "mtc", scenario.value, year)
        element_counts[year] = element_count(atm_cum)

    return ScenarioResult(
        scenario=scenario,
        plan_atm=plan_atm,
        plan_mtc=plan_mtc,
        reports=reports,
        element_counts=element_counts,
        failures=failures,
    )


def run_study(cfg: StudyConfig) -> StudyResult:
    """Execute the full study grid; deterministic for a fixed seed."""
    catalog = load_catalog(cfg.catalog_path)
    topology = _load_or_synth_topology(cfg)
    homing = dual_home_all(topology)
    base = synth_demands(
        topology.leaf_ids(),
        cfg.traffic.mean_gbps,
        cfg.traffic.min_gbps,
        cfg.traffic.max_gbps,
        seed=cfg.seed,
    )
    shared_failures: list[QotFailure] = []
    mtc_routes = _gate_mtc_routes(topology, cfg, catalog, shared_failures)

    scenario_results: dict[Scenario, ScenarioResult] = {}
    if cfg.workers > 1 and len(cfg.scenarios) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {
                sc: pool.submit(_run_scenario, sc, topology, homing, base,
                                mtc_routes, cfg, catalog)
                for sc in cfg.scenarios
            }
            for sc in cfg.scenarios:
                scenario_results[sc] = futures[sc].result()
    else:
        for sc in cfg.scenarios:
            scenario_results[sc] = _run_scenario(sc, topology, homing, base,
                                                 mtc_routes, cfg, catalog)

    failures = list(shared_failures)
    for sc in cfg.scenarios:
        failures.extend(scenario_results[sc].failures)
    return StudyResult(config=cfg, topology=topology,
                       scenario_results=scenario_results, failures=failures)


# -- report emission ---------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".6f").rstrip("0").rstrip(".")
    return str(value)


def _write_csv(path: FsPath, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def emit_report(result: StudyResult, out_dir: str, fmt: str = "csv") -> list[str]:
    """Write the study outputs; returns the emitted file names.

    Files: totals.csv (per segment/scenario/year/kind ledger),
    comparison.csv (pairwise scenario deltas), plotdata.csv (long-format
    series), plan.csv (cumulative placements at the final year) and
    manifest.json (inputs, seed, failures).  JSON format mirrors the
    same tables as arrays of objects.
    """
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown report format {fmt!r}")
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    emitted: list[str] = []

    if not cfg.scenarios:
        (out / "NOTICE.txt").write_text("no scenarios configured; nothing to report\n")
        return ["NOTICE.txt"]

    totals_rows: list[list] = []
    for sc in cfg.scenarios:
        for segment in ("atm", "mtc"):
            for year in range(1, cfg.horizon_years + 1):
                rep = result.report(sc, segment, year)
                shares = ledger_mod.breakdown(rep, "cost") if rep.cost_cu else {}
                for kt in rep.per_kind:
                    totals_rows.append([
                        segment, sc.value, year, kt.kind, kt.count,
                        kt.cost_cu, kt.cost_eur, kt.power_w,
                        round(shares.get(kt.kind, 0.0), 4),
                    ])

    comparison_rows: list[list] = []
    pairs = [
        (a, b) for i, a in enumerate(cfg.scenarios) for b in cfg.scenarios[i + 1:]
    ]
    for a, b in pairs:
        for year in range(1, cfg.horizon_years + 1):
            for metric, getter in (
                ("cost_atm", lambda s, y: result.report(s, "atm", y).cost_cu),
                ("power_atm", lambda s, y: result.report(s, "atm", y).power_w),
                ("elements_atm", lambda s, y: result.elements(s, y)["total"]),
                ("cost_mtc", lambda s, y: result.report(s, "mtc", y).cost_cu),
                ("power_mtc", lambda s, y: result.report(s, "mtc", y).power_w),
            ):
                va, vb = float(getter(a, year)), float(getter(b, year))
                if va == 0 and vb == 0:
                    continue
                hi, lo = (a, b) if va >= vb else (b, a)
                delta = ledger_mod.compare(max(va, vb), min(va, vb))
                comparison_rows.append(
                    [metric, hi.value, lo.value, year, round(delta, 4)]
                )

    plot_rows: list[list] = []
    for sc in cfg.scenarios:
        for year in range(1, cfg.horizon_years + 1):
            plot_rows.append(["elements_atm", sc.value, year,
                              result.elements(sc, year)["total"]])
            plot_rows.append(["cost_atm_cu", sc.value, year,
                              result.report(sc, "atm", year).cost_cu])
            plot_rows.append(["power_atm_w", sc.value, year,
                              result.report(sc, "atm", year).power_w])
            plot_rows.append(["cost_mtc_cu", sc.value, year,
                              result.report(sc, "mtc", year).cost_cu])
            plot_rows.append(["power_mtc_w", sc.value, year,
                              result.report(sc, "mtc", year).power_w])

    plan_rows: list[list] = []
    for sc in cfg.scenarios:
        res = result.scenario_results[sc]
        for segment, plan in (("atm", res.plan_atm), ("mtc", res.plan_mtc)):
            for p in plan.placements(cfg.horizon_years):
                plan_rows.append([segment, sc.value, p.year, p.node, p.kind, p.count, p.cause])

    if fmt == "csv":
        _write_csv(out / "totals.csv",
                   ["segment", "scenario", "year", "kind", "count",
                    "cost_cu", "cost_eur", "power_w", "share_pct"], totals_rows)
        _write_csv(out / "comparison.csv",
                   ["metric", "scenario_a", "scenario_b", "year", "delta_pct"],
                   comparison_rows)
        _write_csv(out / "plotdata.csv", ["metric", "scenario", "year", "value"], plot_rows)
        _write_csv(out / "plan.csv",
                   ["segment", "scenario", "year", "node", "kind", "count", "cause"],
                   plan_rows)
        emitted += ["totals.csv", "comparison.csv", "plotdata.csv", "plan.csv"]
    else:
        def dump(name: str, header: list[str], rows: list[list]) -> None:
            payload = [dict(zip(header, [_fmt(v) for v in row])) for row in rows]
            (out / name).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
            emitted.append(name)

        dump("totals.json", ["segment", "scenario", "year", "kind", "count",
                             "cost_cu", "cost_eur", "power_w", "share_pct"], totals_rows)
        dump("comparison.json", ["metric", "scenario_a", "scenario_b", "year", "delta_pct"],
             comparison_rows)
        dump("plotdata.json", ["metric", "scenario", "year", "value"], plot_rows)
        dump("plan.json", ["segment", "scenario", "year", "node", "kind", "count", "cause"],
             plan_rows)

    stats = topology_stats(result.topology)
    manifest = {
        "seed": cfg.seed,
        "scenarios": [s.value for s in cfg.scenarios],
        "horizon_years": cfg.horizon_years,
        "growth_rate": cfg.growth.annual_rate,
        "topology": {
            "leaves": stats.n_leaves,
            "cos": stats.n_cos,
            "mtc_links": stats.n_mtc_links,
            "mean_mtc_link_km": round(stats.mean_link_km, 4) if stats.mean_mtc_link_km is None
            else round(stats.mean_mtc_link_km, 4),
            "source": cfg.topology_path or "synthesized",
        },
        "failures": [
            {
                "scenario": f.scenario, "year": f.year, "segment": f.segment,
                "subject": f.subject, "limiting": f.limiting, "detail": f.detail,
            }
            for f in result.failures
        ],
        "inputs_sha256": hashlib.sha256(
            json.dumps({
                "seed": cfg.seed,
                "traffic": [cfg.traffic.mean_gbps, cfg.traffic.min_gbps, cfg.traffic.max_gbps],
                "growth": cfg.growth.annual_rate,
                "horizon": cfg.horizon_years,
                "scenarios": [s.value for s in cfg.scenarios],
            }, sort_keys=True).encode()
        ).hexdigest(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    emitted.append("manifest.json")
    return emitted
