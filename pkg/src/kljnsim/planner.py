"""Key-distribution planning: hardware counts and pairing schedules for
full-mesh, star and line topologies, with completion times from the
single-link timing model.

All per-pair times use the ideal one-bit-per-period figure; summaries also
show the effective figure, scaled by the mixed-state yield of fair resistor
choices (half of all periods), since pure periods carry no key bit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .link import key_time
from .netspec import NetworkSpec

# Expected periods per extracted bit with fair independent resistor choices:
# only the two mixed states (probability 1/2) yield key material.
MIXED_STATE_OVERHEAD = 2.0


class PlanError(ValueError):
    """Planning prerequisite not met by the network spec."""

    def __init__(self, message: str, hint: str = ""):
        self.hint = hint
        super().__init__(message if not hint else f"{message} ({hint})")


@dataclass(frozen=True)
class Round:
    """Pairings that run simultaneously, and how long the slowest one takes."""

    pairs: tuple[tuple[str, str], ...]
    duration: float
    bye: Optional[str] = None


@dataclass(frozen=True)
class LinkLoad:
    """Serialized key-bit demand placed on one physical link (line topology)."""

    a: str
    b: str
    length: float
    demand_bits: int
    busy_time: float


@dataclass(frozen=True)
class DistributionPlan:
    mode: str  # "full_mesh" | "star" | "line"
    rounds: tuple[Round, ...]
    kljn_units_required: int
    wires_required: int
    total_time: float
    per_pair_key_bits: int
    center: Optional[str] = None
    order: Optional[tuple[str, ...]] = None
    link_loads: tuple[LinkLoad, ...] = ()

    def targeted_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(pair for rnd in self.rounds for pair in rnd.pairs)


def full_mesh_hardware(n: int) -> tuple[int, int]:
    """Device and wire counts for an everyone-to-everyone network:
    M = N(N-1) exchanger units, W = N(N-1)/2 wire connections."""
    if n < 2:
        raise ValueError(f"a network needs at least 2 stations, got {n}")
    return n * (n - 1), n * (n - 1) // 2


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def plan_full_mesh(spec: NetworkSpec, k: int) -> DistributionPlan:
    """All pairs exchange simultaneously on dedicated links: one round.

    Every station pair must be joined by a wire link; the round lasts as long
    as its slowest pair, so with uniform lengths the total time does not grow
    with the station count at all.
    """
    if k < 1:
        raise ValueError(f"key bits per pair must be at least 1, got {k}")
    ids = sorted(spec.station_ids())
    if len(ids) < 2:
        raise PlanError("full mesh needs at least 2 stations")
    wires = spec.wire_links()
    c = spec.kljn_defaults.wave_velocity
    pairs = []
    duration = 0.0
    for a, b in itertools.combinations(ids, 2):
        link = wires.get(_pair(a, b))
        if link is None:
            raise PlanError(
                f"no wire link between {a} and {b}",
                hint="full mesh needs every station pair wired; add the missing link lines",
            )
        pairs.append(_pair(a, b))
        duration = max(duration, key_time(k, link.length, c) / link.parallel_wires)
    m, w = full_mesh_hardware(len(ids))
    rnd = Round(pairs=tuple(pairs), duration=duration)
    return DistributionPlan(
        mode="full_mesh",
        rounds=(rnd,),
        kljn_units_required=m,
        wires_required=w,
        total_time=duration,
        per_pair_key_bits=k,
    )


def round_robin_rounds(items: Sequence[str]) -> list[tuple[list[tuple[str, str]], Optional[str]]]:
    """Circle-method schedule: every unordered pair exactly once, nobody
    paired twice per round.  Even counts need len-1 rounds; odd counts get a
    dummy participant and need len rounds, one bye each."""
    ring: list[Optional[str]] = list(items)
    if len(ring) % 2 == 1:
        ring.append(None)
    m = len(ring)
    rounds: list[tuple[list[tuple[str, str]], Optional[str]]] = []
    for _ in range(m - 1):
        pairs = []
        bye = None
        for i in range(m // 2):
            x, y = ring[i], ring[m - 1 - i]
            if x is None:
                bye = y
            elif y is None:
                bye = x
            else:
                pairs.append(_pair(x, y))
        rounds.append((pairs, bye))
        ring = [ring[0]] + [ring[-1]] + ring[1:-1]
    return rounds


def plan_star(spec: NetworkSpec, center: str, k: int) -> DistributionPlan:
    """Spoke stations share one switching exchange; pairs take turns.

    The exchange passively patches two spokes into one loop, so a pair's
    effective wire length is the sum of its spoke lengths.  The circle-method
    rotation realizes the (N-1)-round schedule for even spoke counts; odd
    counts need N rounds with one idle station per round.
    """
    if k < 1:
        raise ValueError(f"key bits per pair must be at least 1, got {k}")
    spec.station(center)  # raises for unknown ids
    others = sorted(s for s in spec.station_ids() if s != center)
    if len(others) < 2:
        raise PlanError("star planning needs at least 2 non-center stations")
    wires = spec.wire_links()
    spokes = {}
    for s in others:
        link = wires.get(_pair(s, center))
        if link is None:
            raise PlanError(
                f"station {s} has no wire spoke to the exchange {center}",
                hint=f"add: link a={s} b={center} kind=wire length=...",
            )
        spokes[s] = link
    c = spec.kljn_defaults.wave_velocity
    rounds = []
    for pairs, bye in round_robin_rounds(others):
        duration = 0.0
        for a, b in pairs:
            loop_length = spokes[a].length + spokes[b].length
            loop_wires = min(spokes[a].parallel_wires, spokes[b].parallel_wires)
            duration = max(duration, key_time(k, loop_length, c) / loop_wires)
        rounds.append(Round(pairs=tuple(pairs), duration=duration, bye=bye))
    n = len(others)
    return DistributionPlan(
        mode="star",
        rounds=tuple(rounds),
        kljn_units_required=n,
        wires_required=n,
        total_time=sum(r.duration for r in rounds),
        per_pair_key_bits=k,
        center=center,
    )


def plan_line(spec: NetworkSpec, order: Sequence[str], k: int) -> DistributionPlan:
    """Chain topology with trusted-relay composition for distant pairs.

    Adjacent pairs exchange directly; a non-adjacent pair consumes k fresh
    bits on every link along its path, the intermediate stations republishing
    the combination.  Links serve their demand in parallel with each other,
    so completion time is the busiest link's serialized demand.
    """
    if k < 1:
        raise ValueError(f"key bits per pair must be at least 1, got {k}")
    order = tuple(order)
    if len(order) < 2:
        raise PlanError("line planning needs at least 2 stations in the order")
    if len(set(order)) != len(order):
        raise PlanError("line order repeats a station")
    for s in order:
        spec.station(s)
    wires = spec.wire_links()
    hops = []
    for left, right in zip(order, order[1:]):
        link = wires.get(_pair(left, right))
        if link is None:
            raise PlanError(
                f"chain is broken: no wire link between {left} and {right}",
                hint=f"add: link a={left} b={right} kind=wire length=...",
            )
        hops.append(link)
    n = len(order)
    c = spec.kljn_defaults.wave_velocity
    demand = [0] * len(hops)
    pairs = []
    for i, j in itertools.combinations(range(n), 2):
        pairs.append(_pair(order[i], order[j]))
        for hop in range(i, j):
            demand[hop] += k
    loads = []
    total_time = 0.0
    for link, bits in zip(hops, demand):
        busy = key_time(bits, link.length, c) / link.parallel_wires
        loads.append(
            LinkLoad(a=link.pair[0], b=link.pair[1], length=link.length, demand_bits=bits, busy_time=busy)
        )
        total_time = max(total_time, busy)
    rnd = Round(pairs=tuple(pairs), duration=total_time)
    return DistributionPlan(
        mode="line",
        rounds=(rnd,),
        kljn_units_required=2 * (n - 1),
        wires_required=n - 1,
        total_time=total_time,
        per_pair_key_bits=k,
        order=order,
        link_loads=tuple(loads),
    )


def plan_time_summary(
    plan: DistributionPlan, overhead: float = MIXED_STATE_OVERHEAD
) -> tuple[list[dict], dict]:
    """Per-round report rows plus a totals row.

    The effective time is the ideal total scaled by the expected
    periods-per-bit overhead; both figures are always reported, the effective
    one labeled as model-derived.
    """
    if not plan.rounds:
        raise ValueError("plan has no rounds to report")
    rows = []
    for number, rnd in enumerate(plan.rounds, start=1):
        rows.append(
            {
                "round": number,
                "pairs": ";".join(f"{a}-{b}" for a, b in rnd.pairs),
                "bye": rnd.bye or "",
                "duration_s": rnd.duration,
            }
        )
    summary = {
        "mode": plan.mode,
        "center": plan.center or "",
        "order": ";".join(plan.order) if plan.order else "",
        "rounds": len(plan.rounds),
        "kljn_units": plan.kljn_units_required,
        "wires": plan.wires_required,
        "per_pair_key_bits": plan.per_pair_key_bits,
        "total_time_ideal_s": plan.total_time,
        "total_time_effective_s": plan.total_time * overhead,
        "effective_model": f"ideal x {overhead:g} mixed-state overhead",
    }
    return rows, summary
