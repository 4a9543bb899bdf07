"""Equipment catalog and exact cost/power accounting.

Monetary math runs on :class:`decimal.Decimal` (0.001 cost-unit
quantum) so ledger sums are exact, reproducible and independent of
summation order.  One cost unit converts to euros at a fixed rate
carried by the catalog.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from importlib import resources
from typing import Iterable

CU_QUANTUM = Decimal("0.001")


class LedgerError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    kind: str
    cost_cu: Decimal
    power_w: Decimal
    reach_km: float | None = None
    snr_threshold_db: float | None = None
    notes: str = ""

    def __post_init__(self) -> None:
        if self.cost_cu < 0:
            raise LedgerError(f"{self.kind}: cost must be >= 0")
        if self.power_w < 0:
            raise LedgerError(f"{self.kind}: power must be >= 0")


@dataclass(frozen=True)
class Catalog:
    entries: dict[str, CatalogEntry]
    cu_to_eur: Decimal = Decimal(5000)

    def __getitem__(self, kind: str) -> CatalogEntry:
        try:
            return self.entries[kind]
        except KeyError:
            raise LedgerError(f"catalog has no entry for equipment kind {kind!r}") from None

    def require(self, kinds: Iterable[str]) -> None:
        """Hard error before simulation if any placement kind is unpriced."""
        missing = sorted({k for k in kinds if k not in self.entries})
        if missing:
            raise LedgerError(f"catalog is missing equipment kinds: {missing}")


def load_catalog(path: str | None = None) -> Catalog:
    """Load the default packaged catalog or a user-supplied JSON file."""
    if path is None:
        text = resources.files("metroplan.data").joinpath("catalog.json").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    doc = json.loads(text)
    entries = {}
    for row in doc["entries"]:
        entry = CatalogEntry(
            kind=row["kind"],
            cost_cu=Decimal(str(row["cost_cu"])),
            power_w=Decimal(str(row["power_w"])),
            reach_km=row.get("reach_km"),
            snr_threshold_db=row.get("snr_threshold_db"),
            notes=row.get("notes", ""),
        )
        if entry.kind in entries:
            raise LedgerError(f"duplicate catalog kind {entry.kind!r}")
        entries[entry.kind] = entry
    return Catalog(entries=entries, cu_to_eur=Decimal(str(doc.get("cu_to_eur", 5000))))


@dataclass(frozen=True)
class KindTotal:
    kind: str
    count: int
    cost_cu: Decimal
    cost_eur: Decimal
    power_w: Decimal


@dataclass(frozen=True)
class CostPowerReport:
    segment: str
    scenario: str
    year: int
    per_kind: tuple[KindTotal, ...]
    cost_cu: Decimal
    cost_eur: Decimal
    power_w: Decimal


def _counts_by_kind(placements) -> dict[str, int]:
    counts: dict[str, int] = {}
    for p in placements:
        counts[p.kind] = counts.get(p.kind, 0) + p.count
    return counts


def cost_of(placements, catalog: Catalog) -> tuple[Decimal, Decimal]:
    """Total cost of a placement list in (cost units, euros); both exact."""
    total = Decimal(0)
    for kind, count in sorted(_counts_by_kind(placements).items()):
        total += catalog[kind].cost_cu * count
    total = total.quantize(CU_QUANTUM)
    return total, total * catalog.cu_to_eur


def power_of(placements, catalog: Catalog) -> Decimal:
    """Total power draw in watts; passive kinds contribute zero."""
    total = Decimal(0)
    for kind, count in sorted(_counts_by_kind(placements).items()):
        total += catalog[kind].power_w * count
    return total


def report(placements, catalog: Catalog, segment: str, scenario: str, year: int) -> CostPowerReport:
    counts = _counts_by_kind(placements)
    catalog.require(counts)
    per_kind = []
    for kind in sorted(counts):
        entry = catalog[kind]
        cost = (entry.cost_cu * counts[kind]).quantize(CU_QUANTUM)
        per_kind.append(
            KindTotal(
                kind=kind,
                count=counts[kind],
                cost_cu=cost,
                cost_eur=cost * catalog.cu_to_eur,
                power_w=entry.power_w * counts[kind],
            )
        )
    cost_total = sum((kt.cost_cu for kt in per_kind), Decimal(0)).quantize(CU_QUANTUM)
    return CostPowerReport(
        segment=segment,
        scenario=scenario,
        year=year,
        per_kind=tuple(per_kind),
        cost_cu=cost_total,
        cost_eur=cost_total * catalog.cu_to_eur,
        power_w=sum((kt.power_w for kt in per_kind), Decimal(0)),
    )


def breakdown(rep: CostPowerReport, metric: str = "cost") -> dict[str, float]:
    """Percentage share per equipment kind of the segment total."""
    if metric == "cost":
        total = rep.cost_cu
        parts = {kt.kind: kt.cost_cu for kt in rep.per_kind}
    elif metric == "power":
        total = rep.power_w
        parts = {kt.kind: kt.power_w for kt in rep.per_kind if kt.power_w > 0}
    else:
        raise LedgerError(f"unknown breakdown metric {metric!r}")
    if total == 0:
        raise LedgerError(f"cannot compute {metric} shares of a zero total")
    return {kind: float(value / total * 100) for kind, value in sorted(parts.items())}


def compare(value_a: Decimal | float, value_b: Decimal | float) -> float:
    """Relative delta (A - B) / A * 100 with A the larger baseline.

    Positive result: B is smaller than A by that percentage.
    """
    a, b = float(value_a), float(value_b)
    if a == 0:
        raise LedgerError("cannot compare against a zero baseline")
    return (a - b) / a * 100.0
