"""Shortest paths, link-and-node-disjoint path pairs, dual-homing.

All routing is over link lengths in km.  Ties are broken on the
lexicographically smallest node-id sequence so results never depend on
iteration order.  Node-disjoint pairs are computed on a split-node
digraph (every node becomes an in/out arc of zero cost) with the
two-pass successive-shortest-path construction: the second pass runs on
reduced costs with the first path's arcs reversed, and the union of both
passes decomposes into the optimal disjoint pair.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .model import Link, NodeKind, Segment, Topology


class RoutingError(ValueError):
    pass


class Unreachable(RoutingError):
    pass


class NoDisjointPair(RoutingError):
    """No link-and-node-disjoint pair exists between the endpoints."""


@dataclass(frozen=True)
class Path:
    nodes: tuple[str, ...]
    links: tuple[Link, ...]
    length_km: float

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.links) + 1:
            raise RoutingError("path node/link counts inconsistent")
        if len(set(self.nodes)) != len(self.nodes):
            raise RoutingError(f"path repeats a node: {self.nodes}")
        for i, ln in enumerate(self.links):
            if {self.nodes[i], self.nodes[i + 1]} != {ln.a, ln.b}:
                raise RoutingError(f"link {i} does not join {self.nodes[i]}-{self.nodes[i + 1]}")

    @property
    def src(self) -> str:
        return self.nodes[0]

    @property
    def dst(self) -> str:
        return self.nodes[-1]


@dataclass(frozen=True)
class PathPair:
    primary: Path
    secondary: Path
    combined_km: float

    def __post_init__(self) -> None:
        p, s = self.primary, self.secondary
        if (p.src, p.dst) != (s.src, s.dst):
            raise RoutingError("pair endpoints differ")
        if {l.key() for l in p.links} & {l.key() for l in s.links}:
            raise RoutingError("pair shares a link")
        if set(p.nodes[1:-1]) & set(s.nodes[1:-1]):
            raise RoutingError("pair shares an intermediate node")
        if abs(self.combined_km - (p.length_km + s.length_km)) > 1e-9:
            raise RoutingError("combined length does not match the two paths")


@dataclass(frozen=True)
class HomingEntry:
    leaf: str
    primary_co: str
    secondary_co: str
    primary_km: float
    secondary_km: float


@dataclass(frozen=True)
class MtcRoute:
    co: str
    hl3: str
    pair: PathPair


def _build_path(t: Topology, nodes: tuple[str, ...]) -> Path:
    by_pair = {l.key(): l for l in t.links}
    links = []
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        ln = by_pair[(a, b) if a <= b else (b, a)]
        links.append(ln)
        total += ln.length_km
    return Path(nodes=nodes, links=tuple(links), length_km=total)


def shortest_path(t: Topology, src: str, dst: str, segment: Segment | None = None) -> Path:
    """Minimum-km simple path; equal-length ties resolve to the
    lexicographically smallest node sequence."""
    if src == dst:
        raise RoutingError("src and dst must differ")
    for nid in (src, dst):
        if nid not in t.nodes:
            raise RoutingError(f"unknown node {nid!r}")

    # Heap keyed by (distance, node sequence): the first settle of a node
    # carries both its shortest distance and the lex-smallest sequence
    # among shortest prefixes, which extends to the full path.
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (src,))]
    settled: set[str] = set()
    while heap:
        dist, seq = heapq.heappop(heap)
        cur = seq[-1]
        if cur in settled:
            continue
        settled.add(cur)
        if cur == dst:
            return _build_path(t, seq)
        for ln in t.links_of(cur, segment):
            nxt = ln.other(cur)
            if nxt not in settled:
                heapq.heappush(heap, (dist + ln.length_km, seq + (nxt,)))
    raise Unreachable(f"no path from {src!r} to {dst!r}")


# -- disjoint pairs ----------------------------------------------------------

_IN, _OUT = 0, 1


def _split_arcs(t: Topology, segment: Segment | None):
    """Arcs of the node-split digraph: (tail, head) -> length."""
    arcs: dict[tuple[tuple[str, int], tuple[str, int]], float] = {}
    for nid in t.nodes:
        arcs[((nid, _IN), (nid, _OUT))] = 0.0
    for ln in t.links:
        if segment is not None and ln.segment is not segment:
            continue
        arcs[((ln.a, _OUT), (ln.b, _IN))] = ln.length_km
        arcs[((ln.b, _OUT), (ln.a, _IN))] = ln.length_km
    return arcs


def _dijkstra_arcs(arcs, adj, source):
    """Distances and lexicographic parent pointers over explicit arcs."""
    dist: dict = {source: 0.0}
    parent: dict = {}
    heap: list[tuple[float, tuple, tuple]] = [(0.0, source, source)]
    settled = set()
    while heap:
        d, u, via = heapq.heappop(heap)
        if u in settled:
            continue
        settled.add(u)
        if u != source:
            parent[u] = via
        for v in adj.get(u, ()):
            w = arcs[(u, v)]
            nd = d + w
            if v not in settled and (v not in dist or nd < dist[v] - 1e-15):
                dist[v] = nd
                heapq.heappush(heap, (nd, v, u))
            elif v not in settled and abs(nd - dist[v]) <= 1e-15:
                heapq.heappush(heap, (nd, v, u))
    return dist, parent


def _trace(parent, source, sink):
    seq = [sink]
    while seq[-1] != source:
        seq.append(parent[seq[-1]])
    seq.reverse()
    return seq


def land_pair(t: Topology, src: str, dst: str, segment: Segment | None = None) -> PathPair:
    """Optimal link-and-node-disjoint path pair minimizing combined km.

    Raises :class:`NoDisjointPair` when only one (or no) route exists;
    callers treat that as an explicit verdict, not a fallback.
    """
    if src == dst:
        raise RoutingError("src and dst must differ")
    arcs = _split_arcs(t, segment)
    source, sink = (src, _OUT), (dst, _IN)

    def mkadj(arcset):
        adj: dict = {}
        for (u, v) in arcset:
            adj.setdefault(u, []).append(v)
        for u in adj:
            adj[u].sort()
        return adj

    adj = mkadj(arcs)
    dist1, parent1 = _dijkstra_arcs(arcs, adj, source)
    if sink not in dist1:
        raise Unreachable(f"no path from {src!r} to {dst!r}")
    p1 = _trace(parent1, source, sink)
    p1_arcs = set(zip(p1, p1[1:]))

    # Residual graph on reduced costs w'(u,v) = w + d(u) - d(v) >= 0:
    # arcs of the first path are replaced by zero-cost reversals, and the
    # opposite direction of every used undirected edge is removed so a
    # link cannot be traversed twice.
    arcs2: dict = {}
    for (u, v), w in arcs.items():
        if u not in dist1 or v not in dist1:
            continue
        if (u, v) in p1_arcs:
            continue
        if u[1] == _OUT and v[1] == _IN and ((v[0], _OUT), (u[0], _IN)) in p1_arcs:
            continue
        arcs2[(u, v)] = max(0.0, w + dist1[u] - dist1[v])
    for (u, v) in p1_arcs:
        arcs2[(v, u)] = 0.0

    adj2 = mkadj(arcs2)
    dist2, parent2 = _dijkstra_arcs(arcs2, adj2, source)
    if sink not in dist2:
        raise NoDisjointPair(f"no link-and-node-disjoint pair between {src!r} and {dst!r}")
    p2 = _trace(parent2, source, sink)
    p2_arcs = set(zip(p2, p2[1:]))

    # Union minus cancelling arc pairs decomposes into two disjoint paths.
    union: set = set()
    rev2 = {(v, u) for (u, v) in p2_arcs}
    for arc in p1_arcs:
        if arc not in rev2:
            union.add(arc)
    for arc in p2_arcs:
        if (arc[1], arc[0]) not in p1_arcs:
            union.add(arc)

    out: dict = {}
    for (u, v) in union:
        out.setdefault(u, []).append(v)
    for u in out:
        out[u].sort()

    walks = []
    for _ in range(2):
        seq = [source]
        while seq[-1] != sink:
            nxts = out[seq[-1]]
            nxt = nxts.pop(0)
            seq.append(nxt)
        walks.append(seq)

    paths = []
    for walk in walks:
        node_seq = tuple(nid for (nid, tag) in walk if tag == _OUT)
        if node_seq[-1] != dst:
            node_seq = node_seq + (dst,)
        paths.append(_build_path(t, node_seq))
    paths.sort(key=lambda p: (p.length_km, p.nodes))
    primary, secondary = paths
    return PathPair(primary=primary, secondary=secondary,
                    combined_km=primary.length_km + secondary.length_km)


def dual_home(t: Topology, leaf: str) -> HomingEntry:
    """Primary/secondary CO for a leaf: nearest feeder first, CO id on ties."""
    node = t.nodes.get(leaf)
    if node is None or node.kind is not NodeKind.LEAF:
        raise RoutingError(f"{leaf!r} is not a leaf node")
    best: dict[str, float] = {}
    for ln in t.links_of(leaf, Segment.ATM):
        co = ln.other(leaf)
        if co not in best or ln.length_km < best[co]:
            best[co] = ln.length_km
    if len(best) < 2:
        raise RoutingError(f"leaf {leaf!r} reaches only {len(best)} CO(s)")
    ranked = sorted(best.items(), key=lambda kv: (kv[1], kv[0]))
    (pco, pkm), (sco, skm) = ranked[0], ranked[1]
    return HomingEntry(leaf=leaf, primary_co=pco, secondary_co=sco,
                       primary_km=pkm, secondary_km=skm)


def dual_home_all(t: Topology) -> dict[str, HomingEntry]:
    return {leaf: dual_home(t, leaf) for leaf in t.leaf_ids()}


def mtc_route(t: Topology, co: str, hl3_targets: list[str]) -> MtcRoute:
    """LAND pair from a CO to its nearest HL3 (min combined km, id tie-break)."""
    if not hl3_targets:
        raise RoutingError("no HL3 targets given")
    best: MtcRoute | None = None
    for hl3 in sorted(hl3_targets):
        if hl3 == co:
            continue
        try:
            pair = land_pair(t, co, hl3, segment=Segment.MTC)
        except (NoDisjointPair, Unreachable):
            continue
        if best is None or (pair.combined_km, hl3) < (best.pair.combined_km, best.hl3):
            best = MtcRoute(co=co, hl3=hl3, pair=pair)
    if best is None:
        raise NoDisjointPair(f"no disjoint pair from {co!r} to any HL3")
    return best
