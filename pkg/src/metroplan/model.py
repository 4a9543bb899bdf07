"""Network data model: nodes, links, fiber parameters, topology documents.

A topology is a hierarchical two-segment graph: leaf nodes attach to
central offices (COs) through access-to-metro (AtM) feeder links, and COs
interconnect through a metro-to-core (MtC) mesh.  The on-disk format is a
single JSON document carrying both segments (see ``load_topology``).

Topologies are immutable after loading; all validation happens at
construction time so downstream planning code never sees a partially
valid network.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class NodeKind(str, Enum):
    LEAF = "leaf"
    CO = "co"


class Level(str, Enum):
    HL3 = "hl3"
    HL4 = "hl4"
    HL5 = "hl5"
    NONE = "none"


class Geotype(str, Enum):
    DENSE_URBAN = "dense_urban"
    URBAN = "urban"
    SUBURBAN = "suburban"
    RURAL = "rural"


class Segment(str, Enum):
    ATM = "atm"
    MTC = "mtc"


CO_LEVELS = (Level.HL3, Level.HL4, Level.HL5)

DEFAULT_MAX_LEAF_CO_KM = 13.0


class TopologyError(ValueError):
    """Base class for topology document problems."""


class SchemaError(TopologyError):
    """Document does not conform to the topology schema."""


class DuplicateIdError(TopologyError):
    """Two nodes share the same id."""


class InvariantError(TopologyError):
    """Structurally valid document violates a model invariant."""


@dataclass(frozen=True)
class FiberParams:
    """Per-fiber physical constants.

    attenuation in dB/km, group-velocity dispersion in ps^2/km (stored as
    magnitude-signed value, sign is ignored by the nonlinear model), and
    the nonlinear coefficient in 1/(W km).
    """

    alpha_db_km: float = 0.2
    beta2_ps2_km: float = -21.7
    gamma_w_km: float = 1.3

    def __post_init__(self) -> None:
        if not self.alpha_db_km > 0:
            raise InvariantError(f"fiber attenuation must be > 0, got {self.alpha_db_km}")
        if self.gamma_w_km < 0:
            raise InvariantError(f"fiber gamma must be >= 0, got {self.gamma_w_km}")


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    level: Level = Level.NONE
    geotype: Geotype = Geotype.URBAN
    xy: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind is NodeKind.CO and self.level not in CO_LEVELS:
            raise InvariantError(f"CO node {self.id!r} must have a level in {{hl3,hl4,hl5}}")
        if self.kind is NodeKind.LEAF and self.level is not Level.NONE:
            raise InvariantError(f"leaf node {self.id!r} must have level 'none'")


@dataclass(frozen=True)
class Link:
    a: str
    b: str
    length_km: float
    segment: Segment
    fiber: str = "default"

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise InvariantError(f"link {self.a!r}-{self.b!r} is a self-loop")
        if not (math.isfinite(self.length_km) and self.length_km > 0):
            raise InvariantError(f"link {self.a!r}-{self.b!r} has invalid length {self.length_km}")

    def key(self) -> tuple[str, str]:
        return (self.a, self.b) if self.a <= self.b else (self.b, self.a)

    def other(self, node_id: str) -> str:
        if node_id == self.a:
            return self.b
        if node_id == self.b:
            return self.a
        raise KeyError(f"{node_id!r} is not an endpoint of link {self.a!r}-{self.b!r}")


@dataclass
class Stats:
    """Aggregate counts produced by :func:`topology_stats`."""

    n_leaves: int
    n_cos: int
    n_by_level: dict[str, int]
    n_links: int
    n_atm_links: int
    n_mtc_links: int
    mean_link_km: float
    mean_mtc_link_km: float | None
    max_leaf_feeder_km: float | None


class Topology:
    """Validated, immutable network graph.

    Safe for concurrent read access; construction is the only mutation.
    """

    def __init__(
        self,
        nodes: list[Node],
        links: list[Link],
        fibers: dict[str, FiberParams] | None = None,
        meta: dict[str, Any] | None = None,
        max_leaf_co_km: float = DEFAULT_MAX_LEAF_CO_KM,
        require_dual_homing: bool = False,
    ) -> None:
        self.require_dual_homing = require_dual_homing
        self.fibers: dict[str, FiberParams] = dict(fibers) if fibers else {"default": FiberParams()}
        self.meta: dict[str, Any] = dict(meta) if meta else {}
        self.max_leaf_co_km = float(max_leaf_co_km)

        self.nodes: dict[str, Node] = {}
        for n in nodes:
            if n.id in self.nodes:
                raise DuplicateIdError(f"duplicate node id {n.id!r}")
            self.nodes[n.id] = n

        self.links: list[Link] = sorted(links, key=lambda l: (l.key(), l.segment.value))
        self._adj: dict[str, list[Link]] = {nid: [] for nid in self.nodes}
        seen_pairs: set[tuple[str, str]] = set()
        for ln in self.links:
            for end in (ln.a, ln.b):
                if end not in self.nodes:
                    raise InvariantError(f"link {ln.a!r}-{ln.b!r} references unknown node {end!r}")
            if ln.key() in seen_pairs:
                raise InvariantError(f"multiple links between {ln.a!r} and {ln.b!r}")
            seen_pairs.add(ln.key())
            if ln.fiber not in self.fibers:
                raise SchemaError(f"link {ln.a!r}-{ln.b!r} references unknown fiber {ln.fiber!r}")
            self._adj[ln.a].append(ln)
            self._adj[ln.b].append(ln)

        self._validate()

    # -- accessors ---------------------------------------------------------

    def node(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def links_of(self, node_id: str, segment: Segment | None = None) -> list[Link]:
        links = self._adj[node_id]
        if segment is None:
            return list(links)
        return [l for l in links if l.segment is segment]

    def leaf_ids(self) -> list[str]:
        return sorted(nid for nid, n in self.nodes.items() if n.kind is NodeKind.LEAF)

    def co_ids(self) -> list[str]:
        return sorted(nid for nid, n in self.nodes.items() if n.kind is NodeKind.CO)

    def fiber_of(self, link: Link) -> FiberParams:
        return self.fibers[link.fiber]

    # -- validation --------------------------------------------------------

    def _validate(self) -> None:
        for ln in self.links:
            na, nb = self.nodes[ln.a], self.nodes[ln.b]
            kinds = {na.kind, nb.kind}
            if ln.segment is Segment.ATM:
                if kinds != {NodeKind.LEAF, NodeKind.CO}:
                    raise InvariantError(
                        f"AtM link {ln.a!r}-{ln.b!r} must connect a leaf to a CO"
                    )
                if ln.length_km > self.max_leaf_co_km:
                    raise InvariantError(
                        f"feeder {ln.a!r}-{ln.b!r} is {ln.length_km} km, exceeds "
                        f"max leaf-to-CO distance {self.max_leaf_co_km} km"
                    )
            else:
                if kinds != {NodeKind.CO}:
                    raise InvariantError(f"MtC link {ln.a!r}-{ln.b!r} must connect two COs")

        if self.require_dual_homing:
            check_dual_homing(self)

        self._check_mtc_connected()

    def _check_mtc_connected(self) -> None:
        cos = self.co_ids()
        if len(cos) <= 1:
            return
        seen = {cos[0]}
        stack = [cos[0]]
        while stack:
            cur = stack.pop()
            for ln in self.links_of(cur, Segment.MTC):
                nxt = ln.other(cur)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        missing = [c for c in cos if c not in seen]
        if missing:
            raise InvariantError(f"MtC subgraph is not connected; unreachable COs: {missing[:5]}")


def check_dual_homing(t: Topology) -> None:
    """Require every leaf to have feeders to at least two distinct COs.

    Direct feeder links are node-disjoint routes by construction, so the
    check reduces to counting distinct CO endpoints per leaf.
    """
    for leaf in t.leaf_ids():
        cos = {l.other(leaf) for l in t.links_of(leaf, Segment.ATM)}
        if len(cos) < 2:
            raise InvariantError(
                f"leaf {leaf!r} reaches {len(cos)} CO(s); dual homing needs feeders "
                f"to at least 2 distinct COs"
            )


# -- document I/O ------------------------------------------------------------


def _require(mapping: dict, key: str, ctx: str) -> Any:
    if key not in mapping:
        raise SchemaError(f"{ctx}: missing field {key!r}")
    return mapping[key]


def _enum(value: Any, enum_cls: type[Enum], ctx: str) -> Any:
    try:
        return enum_cls(value)
    except ValueError:
        valid = [e.value for e in enum_cls]
        raise SchemaError(f"{ctx}: invalid value {value!r}, expected one of {valid}") from None


def load_topology(
    document: str | dict,
    max_leaf_co_km: float | None = None,
    require_dual_homing: bool = False,
) -> Topology:
    """Parse and validate a topology document (JSON text or object).

    Raises :class:`SchemaError`, :class:`DuplicateIdError` or
    :class:`InvariantError` with a message naming the offending field,
    node or link.  Never returns a partially valid topology.
    """
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"document is not valid JSON: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("document root must be an object")

    fibers: dict[str, FiberParams] = {}
    for name, spec in doc.get("fibers", {"default": {}}).items():
        if not isinstance(spec, dict):
            raise SchemaError(f"fibers[{name!r}]: must be an object")
        fibers[name] = FiberParams(
            alpha_db_km=float(spec.get("alpha_db_km", 0.2)),
            beta2_ps2_km=float(spec.get("beta2_ps2_km", -21.7)),
            gamma_w_km=float(spec.get("gamma_w_km", 1.3)),
        )
    if "default" not in fibers:
        fibers["default"] = FiberParams()

    nodes: list[Node] = []
    for i, nd in enumerate(_require(doc, "nodes", "document")):
        ctx = f"nodes[{i}]"
        if not isinstance(nd, dict):
            raise SchemaError(f"{ctx}: must be an object")
        kind = _enum(_require(nd, "kind", ctx), NodeKind, f"{ctx}.kind")
        level = _enum(nd.get("level", "none"), Level, f"{ctx}.level")
        geotype = _enum(nd.get("geotype", "urban"), Geotype, f"{ctx}.geotype")
        xy = nd.get("xy")
        if xy is not None:
            if not (isinstance(xy, (list, tuple)) and len(xy) == 2):
                raise SchemaError(f"{ctx}.xy: must be a [x, y] pair")
            xy = (float(xy[0]), float(xy[1]))
        nodes.append(Node(id=str(_require(nd, "id", ctx)), kind=kind, level=level,
                          geotype=geotype, xy=xy))

    links: list[Link] = []
    for i, lk in enumerate(_require(doc, "links", "document")):
        ctx = f"links[{i}]"
        if not isinstance(lk, dict):
            raise SchemaError(f"{ctx}: must be an object")
        try:
            length = float(_require(lk, "length_km", ctx))
        except (TypeError, ValueError):
            raise SchemaError(f"{ctx}.length_km: must be a number") from None
        links.append(
            Link(
                a=str(_require(lk, "a", ctx)),
                b=str(_require(lk, "b", ctx)),
                length_km=length,
                segment=_enum(_require(lk, "segment", ctx), Segment, f"{ctx}.segment"),
                fiber=str(lk.get("fiber", "default")),
            )
        )

    kwargs: dict[str, Any] = {}
    meta = dict(doc.get("meta", {}))
    # the distance cap round-trips through meta; keep it out of the stored dict
    meta_cap = meta.pop("max_leaf_co_km", None)
    if max_leaf_co_km is not None:
        kwargs["max_leaf_co_km"] = max_leaf_co_km
    elif meta_cap is not None:
        kwargs["max_leaf_co_km"] = float(meta_cap)
    return Topology(nodes, links, fibers=fibers, meta=meta,
                    require_dual_homing=require_dual_homing, **kwargs)


def save_topology(t: Topology) -> str:
    """Serialize a topology to its canonical JSON document.

    ``load_topology(save_topology(t))`` reproduces the model field for
    field; output is byte-stable for identical inputs.
    """
    doc = {
        "meta": {**t.meta, "max_leaf_co_km": t.max_leaf_co_km},
        "fibers": {
            name: {
                "alpha_db_km": fp.alpha_db_km,
                "beta2_ps2_km": fp.beta2_ps2_km,
                "gamma_w_km": fp.gamma_w_km,
            }
            for name, fp in sorted(t.fibers.items())
        },
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "level": n.level.value,
                "geotype": n.geotype.value,
                **({"xy": [n.xy[0], n.xy[1]]} if n.xy is not None else {}),
            }
            for n in sorted(t.nodes.values(), key=lambda n: n.id)
        ],
        "links": [
            {
                "a": l.a,
                "b": l.b,
                "length_km": l.length_km,
                "segment": l.segment.value,
                "fiber": l.fiber,
            }
            for l in t.links
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def topology_stats(t: Topology) -> Stats:
    """Exact node/link counts and mean lengths for reporting and tests."""
    n_by_level = {lv.value: 0 for lv in CO_LEVELS}
    n_leaves = n_cos = 0
    for n in t.nodes.values():
        if n.kind is NodeKind.LEAF:
            n_leaves += 1
        else:
            n_cos += 1
            n_by_level[n.level.value] += 1
    atm = [l for l in t.links if l.segment is Segment.ATM]
    mtc = [l for l in t.links if l.segment is Segment.MTC]
    mean_all = sum(l.length_km for l in t.links) / len(t.links) if t.links else 0.0
    mean_mtc = sum(l.length_km for l in mtc) / len(mtc) if mtc else None
    max_feeder = max((l.length_km for l in atm), default=None)
    return Stats(
        n_leaves=n_leaves,
        n_cos=n_cos,
        n_by_level=n_by_level,
        n_links=len(t.links),
        n_atm_links=len(atm),
        n_mtc_links=len(mtc),
        mean_link_km=mean_all,
        mean_mtc_link_km=mean_mtc,
        max_leaf_feeder_km=max_feeder,
    )
