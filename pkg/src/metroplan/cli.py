"""Batch command-line front end.

Verbs: ``synth`` writes a topology document, ``validate`` checks one and
prints its stats, ``plan`` runs the full multi-year study and emits
reports, ``report`` re-emits reports from a completed plan run.

Exit codes: 0 success, 2 configuration error, 3 study completed with
QoT-infeasible demands only, 4 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .dimensioning import Scenario
from .model import TopologyError, load_topology, save_topology, topology_stats
from .study import (
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_INTERNAL,
    EXIT_OK,
    ConfigError,
    StudyConfig,
    TrafficParams,
    emit_report,
    run_study,
)
from .synth import SynthError, SynthParams, synth_reference
from .traffic import GrowthModel


def _scenarios(value: str) -> tuple[Scenario, ...]:
    if value == "all":
        return (Scenario.BENCHMARK, Scenario.PTP, Scenario.PTMP)
    try:
        return tuple(Scenario(v.strip()) for v in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown scenario in {value!r}; use benchmark|ptp|ptmp|all"
        ) from None


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _build_study_config(args: argparse.Namespace) -> StudyConfig:
    overrides: dict = {}
    if args.config:
        doc = _load_config_file(args.config)
        if "synth" in doc:
            overrides["synth"] = SynthParams(**doc["synth"])
        if "traffic" in doc:
            overrides["traffic"] = TrafficParams(**doc["traffic"])
        if "growth" in doc:
            overrides["growth"] = GrowthModel(**doc["growth"])
        for key in ("topology_path", "horizon_years", "seed", "workers", "catalog_path"):
            if key in doc:
                overrides[key] = doc[key]
        if "scenarios" in doc:
            overrides["scenarios"] = tuple(Scenario(s) for s in doc["scenarios"])
    if args.scenario:
        overrides["scenarios"] = _scenarios(args.scenario)
    if args.years is not None:
        overrides["horizon_years"] = args.years
        overrides["growth"] = dataclasses.replace(
            overrides.get("growth", GrowthModel()), horizon_years=max(args.years, 1)
        )
    if args.growth is not None:
        overrides["growth"] = dataclasses.replace(
            overrides.get("growth", GrowthModel()), annual_rate=args.growth
        )
    if args.seed is not None:
        overrides["seed"] = args.seed
        if "synth" not in overrides:
            overrides["synth"] = SynthParams(seed=args.seed)
        else:
            overrides["synth"] = dataclasses.replace(overrides["synth"], seed=args.seed)
    if getattr(args, "topology", None):
        overrides["topology_path"] = args.topology
    if getattr(args, "workers", None):
        overrides["workers"] = args.workers
    return StudyConfig(**overrides)


def cmd_synth(args: argparse.Namespace) -> int:
    params = SynthParams(seed=args.seed if args.seed is not None else 1)
    if args.config:
        doc = _load_config_file(args.config)
        params = SynthParams(**doc.get("synth", doc))
        if args.seed is not None:
            params = dataclasses.replace(params, seed=args.seed)
    topo = synth_reference(params)
    out = Path(args.out or "topology.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(save_topology(topo), encoding="utf-8")
    stats = topology_stats(topo)
    print(f"wrote {out}: {stats.n_leaves} leaves, {stats.n_cos} COs, "
          f"{stats.n_mtc_links} MtC links, mean {stats.mean_mtc_link_km:.2f} km")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    with open(args.topology, "r", encoding="utf-8") as fh:
        topo = load_topology(fh.read())
    s = topology_stats(topo)
    print(json.dumps({
        "leaves": s.n_leaves,
        "cos": s.n_cos,
        "by_level": s.n_by_level,
        "links": s.n_links,
        "atm_links": s.n_atm_links,
        "mtc_links": s.n_mtc_links,
        "mean_link_km": round(s.mean_link_km, 3),
        "mean_mtc_link_km": None if s.mean_mtc_link_km is None else round(s.mean_mtc_link_km, 3),
        "max_leaf_feeder_km": s.max_leaf_feeder_km,
    }, indent=1, sort_keys=True))
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    cfg = _build_study_config(args)
    result = run_study(cfg)
    out = args.out or "study_out"
    files = emit_report(result, out, fmt=args.format)
    print(f"wrote {len(files)} files to {out}: {', '.join(files)}")
    if result.failures:
        print(f"{len(result.failures)} QoT-infeasible demand legs; see manifest.json",
              file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    # re-runs the deterministic study from config; equivalent to plan
    return cmd_plan(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metroplan",
        description="access-metro IP-over-WDM planning studies",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="study seed")
        p.add_argument("--out", help="output directory or file")

    p_synth = sub.add_parser("synth", help="generate a reference topology document")
    common(p_synth)
    p_synth.set_defaults(func=cmd_synth)

    p_validate = sub.add_parser("validate", help="validate a topology document")
    p_validate.add_argument("topology", help="topology JSON file")
    p_validate.set_defaults(func=cmd_validate)

    for verb, fn in (("plan", cmd_plan), ("report", cmd_report)):
        p = sub.add_parser(verb, help=f"{verb} a multi-year scenario study")
        common(p)
        p.add_argument("--scenario", default=None, help="benchmark|ptp|ptmp|all or a comma list")
        p.add_argument("--years", type=int, default=None, help="study horizon in years")
        p.add_argument("--growth", type=float, default=None, help="annual growth rate fraction")
        p.add_argument("--topology", default=None, help="topology JSON file (default: synthesize)")
        p.add_argument("--workers", type=int, default=None, help="parallel scenario workers")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=fn)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SynthError, TopologyError, FileNotFoundError, json.JSONDecodeError,
            TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
