"""Seeded synthesis of reference topologies and geotype variants.

The reference network family: COs sit on a ring (kept 2-edge-connected
by construction) with extra chord links anchored at the core-level hubs,
which carves the ring into short dual-reachable sections.  Every leaf
attaches to two distinct COs through direct feeders, primary strictly
shorter than secondary, so dual homing always resolves.  MtC link
lengths are drawn from a truncated normal and rescaled to hit the target
mean exactly; feeder lengths follow a lognormal whose tail beyond the
long-reach limit stays small, re-sampled against the distance cap.

Output is a pure function of (params, seed): the emitted document is
byte-identical across runs, and the generator name and seed are recorded
in its header.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .model import (
    FiberParams,
    Geotype,
    Level,
    Link,
    Node,
    NodeKind,
    Segment,
    Topology,
)
from .routing import shortest_path

GENERATOR_NAME = "metroplan-synth"
PRNG_NAME = "numpy-pcg64"


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthParams:
    n_leaves: int = 876
    n_co: int = 38
    level_split: tuple[int, int, int] = (2, 10, 26)  # (HL3, HL4, HL5)
    n_mtc_links: int = 46
    mean_mtc_len_km: float = 21.2
    mtc_len_spread_km: float = 6.0
    max_leaf_dist_km: float = 13.0
    feeder_log_mean: float = 1.0727
    feeder_log_sigma: float = 0.6
    secondary_feeder_factor: tuple[float, float] = (1.15, 1.8)
    geotype_mix: dict[str, float] = field(
        default_factory=lambda: {
            "dense_urban": 0.25, "urban": 0.25, "suburban": 0.25, "rural": 0.25,
        }
    )
    seed: int = 1

    def __post_init__(self) -> None:
        if min(self.n_leaves, self.n_co) <= 0:
            raise SynthError("node counts must be positive")
        if sum(self.level_split) != self.n_co:
            raise SynthError(
                f"level split {self.level_split} must sum to n_co = {self.n_co}"
            )
        if abs(sum(self.geotype_mix.values()) - 1.0) > 1e-9:
            raise SynthError("geotype mix fractions must sum to 1")
        if self.n_mtc_links < self.n_co:
            raise SynthError(
                f"{self.n_mtc_links} MtC links over {self.n_co} COs cannot be "
                f"2-edge-connected (ring needs at least n_co links)"
            )


def _co_names(n: int) -> list[str]:
    width = len(str(n - 1)) if n > 1 else 1
    return [f"co{str(i).zfill(width)}" for i in range(n)]


def _leaf_names(n: int) -> list[str]:
    width = len(str(n - 1)) if n > 1 else 1
    return [f"leaf{str(i).zfill(width)}" for i in range(n)]


def _assign_levels(cos: list[str], split: tuple[int, int, int]) -> dict[str, Level]:
    """Spread core hubs evenly around the ring, aggregation tier next to them."""
    n = len(cos)
    n_hl3, n_hl4, _ = split
    levels = {co: Level.HL5 for co in cos}
    hl3_pos = [round(i * n / max(1, n_hl3)) % n for i in range(n_hl3)]
    for p in hl3_pos:
        levels[cos[p]] = Level.HL3
    remaining = [i for i in range(n) if levels[cos[i]] is Level.HL5]
    # HL4s nearest the hubs (ring distance), deterministic tie-break by index
    def hub_dist(i: int) -> int:
        return min(min((i - p) % n, (p - i) % n) for p in hl3_pos) if hl3_pos else 0
    remaining.sort(key=lambda i: (hub_dist(i), i))
    for i in remaining[:n_hl4]:
        levels[cos[i]] = Level.HL4
    return levels


def _mtc_links(cos: list[str], params: SynthParams, rng: np.random.Generator) -> list[tuple[str, str]]:
    n = len(cos)
    pairs = [(cos[i], cos[(i + 1) % n]) for i in range(n)] if n > 2 else []
    if n == 2:
        pairs = [(cos[0], cos[1])]
    existing = {tuple(sorted(p)) for p in pairs}
    n_chords = params.n_mtc_links - len(pairs)
    if n_chords < 0:
        raise SynthError("link budget below ring size")

    levels = _assign_levels(cos, params.level_split)
    hubs = [co for co in cos if levels[co] is Level.HL3] or cos[:1]
    hub_pos = {co: cos.index(co) for co in hubs}

    chords = 0
    attempt = 0
    while chords < n_chords:
        hub = hubs[chords % len(hubs)]
        # anchor chords at the hubs, spreading targets over the ring
        offset = int(rng.integers(2, n - 2)) if n > 4 else 1
        target = cos[(hub_pos[hub] + offset) % n]
        key = tuple(sorted((hub, target)))
        attempt += 1
        if hub != target and key not in existing:
            existing.add(key)
            pairs.append((hub, target))
            chords += 1
        if attempt > 200 * max(1, n_chords):
            raise SynthError("could not place chord links; too few distinct CO pairs")
    return pairs


def _mtc_lengths(n: int, params: SynthParams, rng: np.random.Generator) -> list[float]:
    lengths = rng.normal(params.mean_mtc_len_km, params.mtc_len_spread_km, size=n)
    lengths = np.clip(lengths, 1.0, None)
    scale = params.mean_mtc_len_km / lengths.mean()
    lengths = np.clip(lengths * scale, 1.0, None)
    # one more pass pins the mean after clipping
    lengths = lengths * (params.mean_mtc_len_km / lengths.mean())
    return [float(x) for x in lengths]


def _feeder_length(params: SynthParams, rng: np.random.Generator) -> float:
    for _ in range(1000):
        length = float(rng.lognormal(params.feeder_log_mean, params.feeder_log_sigma))
        if 0.05 <= length <= params.max_leaf_dist_km:
            return length
    raise SynthError("feeder length distribution incompatible with the distance cap")


def synth_reference(params: SynthParams | None = None) -> Topology:
    """Generate the hierarchical reference topology for the given params."""
    params = params or SynthParams()
    rng = np.random.default_rng(params.seed)

    cos = _co_names(params.n_co)
    leaves = _leaf_names(params.n_leaves)
    levels = _assign_levels(cos, params.level_split)

    geotype_names = sorted(params.geotype_mix)
    geotype_p = np.array([params.geotype_mix[g] for g in geotype_names])
    geotype_p = geotype_p / geotype_p.sum()
    leaf_geo = rng.choice(len(geotype_names), size=params.n_leaves, p=geotype_p)

    # ring coordinates for plotting only; planning uses link lengths
    ring_r = params.n_co * params.mean_mtc_len_km / (2 * math.pi)
    nodes: list[Node] = []
    for i, co in enumerate(cos):
        ang = 2 * math.pi * i / params.n_co
        nodes.append(
            Node(id=co, kind=NodeKind.CO, level=levels[co], geotype=Geotype.URBAN,
                 xy=(ring_r * math.cos(ang), ring_r * math.sin(ang)))
        )

    pairs = _mtc_links(cos, params, rng)
    lengths = _mtc_lengths(len(pairs), params, rng)
    links: list[Link] = [
        Link(a=a, b=b, length_km=l, segment=Segment.MTC)
        for (a, b), l in zip(pairs, lengths)
    ]

    # leaves: round-robin over a shuffled CO order, secondary = ring neighbour
    co_order = list(rng.permutation(params.n_co))
    lo, hi = params.secondary_feeder_factor
    for j, leaf in enumerate(leaves):
        ci = co_order[j % params.n_co]
        primary = cos[ci]
        secondary = cos[(ci + 1) % params.n_co]
        d1 = _feeder_length(params, rng)
        d2 = min(d1 * float(rng.uniform(lo, hi)), params.max_leaf_dist_km)
        if d2 <= d1:  # cap collision: keep strict ordering
            d2 = min(d1 * 1.0001, params.max_leaf_dist_km)
            d1 = d2 / 1.0001
        ang = float(rng.uniform(0, 2 * math.pi))
        base = nodes[ci].xy
        nodes.append(
            Node(id=leaf, kind=NodeKind.LEAF, level=Level.NONE,
                 geotype=Geotype(geotype_names[int(leaf_geo[j])]),
                 xy=(base[0] + d1 * math.cos(ang), base[1] + d1 * math.sin(ang)))
        )
        links.append(Link(a=leaf, b=primary, length_km=d1, segment=Segment.ATM))
        links.append(Link(a=leaf, b=secondary, length_km=d2, segment=Segment.ATM))

    meta = {
        "generator": GENERATOR_NAME,
        "prng": PRNG_NAME,
        "seed": params.seed,
        "n_leaves": params.n_leaves,
        "n_co": params.n_co,
        "level_split": list(params.level_split),
        "n_mtc_links": params.n_mtc_links,
        "mean_mtc_len_km": params.mean_mtc_len_km,
    }
    topo = Topology(nodes, links, fibers={"default": FiberParams()}, meta=meta,
                    max_leaf_co_km=params.max_leaf_dist_km, require_dual_homing=True)
    topo.meta["mtc_diameter_km"] = round(mtc_diameter_km(topo), 3)
    return topo


def mtc_diameter_km(t: Topology) -> float:
    """Longest shortest CO-to-CO distance over the metro-core mesh."""
    cos = t.co_ids()
    worst = 0.0
    for i, a in enumerate(cos):
        for b in cos[i + 1:]:
            worst = max(worst, shortest_path(t, a, b, Segment.MTC).length_km)
    return worst


def find_bridges(t: Topology, segment: Segment = Segment.MTC) -> list[tuple[str, str]]:
    """Bridge links of a segment subgraph (empty iff 2-edge-connected)."""
    adj: dict[str, list[str]] = {}
    for ln in t.links:
        if ln.segment is segment:
            adj.setdefault(ln.a, []).append(ln.b)
            adj.setdefault(ln.b, []).append(ln.a)
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    bridges: list[tuple[str, str]] = []
    counter = [0]

    def dfs(root: str) -> None:
        stack = [(root, None, iter(sorted(adj.get(root, ()))))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        while stack:
            node, parent, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt == parent:
                    continue
                if nxt in index:
                    low[node] = min(low[node], index[nxt])
                else:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append((nxt, node, iter(sorted(adj.get(nxt, ())))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    pnode = stack[-1][0]
                    low[pnode] = min(low[pnode], low[node])
                    if low[node] > index[pnode]:
                        bridges.append(tuple(sorted((pnode, node))))
    for start in sorted(adj):
        if start not in index:
            dfs(start)
    return sorted(bridges)


GEOTYPE_DEFAULTS: dict[Geotype, dict] = {
    # synthetic placeholders; shape knobs only, no field data behind them
    Geotype.DENSE_URBAN: {"mean_mtc_len_km": 8.0, "feeder_log_mean": 0.25,
                          "mtc_len_spread_km": 2.5},
    Geotype.URBAN: {"mean_mtc_len_km": 14.0, "feeder_log_mean": 0.7,
                    "mtc_len_spread_km": 4.0},
    Geotype.SUBURBAN: {"mean_mtc_len_km": 24.0, "feeder_log_mean": 1.2,
                       "mtc_len_spread_km": 7.0},
    Geotype.RURAL: {"mean_mtc_len_km": 32.0, "feeder_log_mean": 1.55,
                    "mtc_len_spread_km": 9.0},
}


def synth_geotype(geotype: Geotype, params: SynthParams | None = None) -> Topology:
    """Reference synthesis with geotype-flavoured shape defaults applied."""
    params = params or SynthParams()
    overrides = GEOTYPE_DEFAULTS[Geotype(geotype)]
    shaped = replace(params, **overrides)
    topo = synth_reference(shaped)
    topo.meta["geotype"] = Geotype(geotype).value
    topo.meta["geotype_defaults"] = "synthetic"
    return topo
