"""Per-pair security classification and station trust scoring.

A pair is unconditionally secure when a chain of unconditional links (all of
whose intermediate stations are trusted relays) connects it; merely being
reachable over any channel kinds leaves it conditional.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Mapping, Optional

from .netspec import Link, LinkKind, NetworkSpec


class SecurityClass(Enum):
    NONE = "none"
    CONDITIONAL = "conditional"
    UNCONDITIONAL = "unconditional"

    @property
    def rank(self) -> int:
        return ("none", "conditional", "unconditional").index(self.value)

    def __lt__(self, other: "SecurityClass") -> bool:
        return self.rank < other.rank


@dataclass(frozen=True)
class SecurityReport:
    pair_classes: Mapping[tuple[str, str], SecurityClass]
    components: tuple[frozenset[str], ...]
    trust: Mapping[str, float]

    def pair_class(self, a: str, b: str) -> SecurityClass:
        return self.pair_classes[tuple(sorted((a, b)))]


def unconditional_edges(spec: NetworkSpec) -> tuple[Link, ...]:
    """Links able to carry an unconditionally secure key exchange.

    Wire links qualify when both ends run KLJN; satellite links only when the
    satellite channel is QKD-equipped and both ground stations have QKD.
    Wireless links never qualify: the ground scheme needs a galvanic wire.
    """
    stations = {s.id: s for s in spec.stations}
    edges = []
    for link in spec.links:
        a, b = stations[link.a], stations[link.b]
        if link.kind is LinkKind.WIRE and a.has_kljn and b.has_kljn:
            edges.append(link)
        elif link.kind is LinkKind.SATELLITE and link.qkd_equipped and a.has_qkd and b.has_qkd:
            edges.append(link)
    return tuple(edges)


def _components(adjacency: Mapping[str, set[str]]) -> list[set[str]]:
    seen: set[str] = set()
    out = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        component = set()
        frontier = [start]
        while frontier:
            node = frontier.pop()
            if node in component:
                continue
            component.add(node)
            frontier.extend(adjacency[node] - component)
        seen |= component
        out.append(component)
    return out


def _adjacency(nodes, pairs) -> dict[str, set[str]]:
    adjacency: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in pairs:
        adjacency[a].add(b)
        adjacency[b].add(a)
    return adjacency


def unconditional_path(spec: NetworkSpec, a: str, b: str) -> Optional[list[str]]:
    """Station path witnessing unconditional reachability, or None."""
    spec.station(a), spec.station(b)
    adjacency = _adjacency(
        spec.station_ids(), [(l.a, l.b) for l in unconditional_edges(spec)]
    )
    parent: dict[str, Optional[str]] = {a: None}
    frontier = [a]
    while frontier:
        node = frontier.pop(0)
        if node == b:
            path = [node]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for neighbor in sorted(adjacency[node]):
            if neighbor not in parent:
                parent[neighbor] = node
                frontier.append(neighbor)
    return None


def trust_score(
    spec: NetworkSpec, station_id: str, kappa: float = 2.0, beta: float = 0.5
) -> float:
    """Monotone, saturating trust score C / (C + kappa).

    C counts the station's unconditional connections: wire edges at full
    weight, satellite edges weighted by beta.  Saturates toward 1 as the
    station accumulates independent secure neighbors.
    """
    spec.station(station_id)
    n_wire = 0
    n_satellite = 0
    for link in unconditional_edges(spec):
        if station_id in (link.a, link.b):
            if link.kind is LinkKind.WIRE:
                n_wire += 1
            else:
                n_satellite += 1
    c = n_wire + beta * n_satellite
    return c / (c + kappa)


def classify_pairs(spec: NetworkSpec, kappa: float = 2.0, beta: float = 0.5) -> SecurityReport:
    """Classify every station pair and partition the secure stations.

    Unconditional: both ends inside one connected component of the
    unconditional edges (trusted-relay key forwarding along the chain).
    Conditional: reachable over links of any kind.  None: disconnected.
    """
    ids = spec.station_ids()
    secure_adj = _adjacency(ids, [(l.a, l.b) for l in unconditional_edges(spec)])
    any_adj = _adjacency(ids, [(l.a, l.b) for l in spec.links])
    secure_comp: dict[str, int] = {}
    secure_sets = []
    for component in _components(secure_adj):
        if len(component) > 1:
            secure_sets.append(frozenset(component))
            for node in component:
                secure_comp[node] = len(secure_sets) - 1
    reach_comp: dict[str, int] = {}
    for idx, component in enumerate(_components(any_adj)):
        for node in component:
            reach_comp[node] = idx
    classes = {}
    for a, b in combinations(sorted(ids), 2):
        if a in secure_comp and secure_comp[a] == secure_comp.get(b):
            cls = SecurityClass.UNCONDITIONAL
        elif reach_comp[a] == reach_comp[b]:
            cls = SecurityClass.CONDITIONAL
        else:
            cls = SecurityClass.NONE
        classes[(a, b)] = cls
    trust = {s: trust_score(spec, s, kappa, beta) for s in ids}
    return SecurityReport(
        pair_classes=classes, components=tuple(secure_sets), trust=trust
    )
