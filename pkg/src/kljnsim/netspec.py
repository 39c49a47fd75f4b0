"""Network description: stations grouped into islands, connected by wire,
wireless or satellite links."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .link import LinkConfig


class NetSpecError(ValueError):
    """Network specification problem, carrying a stable error code and, when
    it came from a file, the offending line number."""

    def __init__(self, code: str, message: str, line: Optional[int] = None, path: str = ""):
        self.code = code
        self.message = message
        self.line = line
        self.path = path
        if line is not None:
            where = f"{path or '<spec>'}:{line}: "
        else:
            where = f"{path}: " if path else ""
        super().__init__(f"{where}{code}: {message}")


class LinkKind(Enum):
    WIRE = "wire"
    WIRELESS = "wireless"
    SATELLITE = "satellite"


@dataclass(frozen=True)
class Station:
    id: str
    island: str
    has_kljn: bool = False
    has_qkd: bool = False
    kljn_unit_budget: int = 0

    def __post_init__(self) -> None:
        if not self.id:
            raise NetSpecError("E_SYNTAX", "station id must be non-empty")
        if self.kljn_unit_budget < 0:
            raise NetSpecError("E_BAD_FIELD", f"unit budget of {self.id} must be >= 0")


@dataclass(frozen=True)
class Link:
    a: str
    b: str
    kind: LinkKind
    length: float
    parallel_wires: int = 1
    qkd_equipped: bool = False

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise NetSpecError("E_SELF_LINK", f"link endpoints must differ, got {self.a} twice")
        if not self.length > 0:
            raise NetSpecError("E_BAD_LENGTH", f"link {self.a}-{self.b} length must be positive, got {self.length}")
        if self.parallel_wires < 1:
            raise NetSpecError("E_BAD_FIELD", f"link {self.a}-{self.b} needs at least one wire")

    @property
    def pair(self) -> tuple[str, str]:
        return tuple(sorted((self.a, self.b)))  # type: ignore[return-value]


@dataclass(frozen=True)
class NetworkSpec:
    stations: tuple[Station, ...]
    links: tuple[Link, ...]
    kljn_defaults: LinkConfig = field(default_factory=LinkConfig)

    def __post_init__(self) -> None:
        by_id: dict[str, Station] = {}
        for station in self.stations:
            if station.id in by_id:
                raise NetSpecError("E_DUPLICATE_STATION", f"station {station.id} declared twice")
            by_id[station.id] = station
        seen_wire_pairs: set[tuple[str, str]] = set()
        for link in self.links:
            for end in (link.a, link.b):
                if end not in by_id:
                    raise NetSpecError("E_UNKNOWN_STATION", f"link references undeclared station {end}")
            if link.kind is LinkKind.WIRE:
                if by_id[link.a].island != by_id[link.b].island:
                    raise NetSpecError(
                        "E_CROSS_ISLAND_WIRE",
                        f"wire link {link.a}-{link.b} crosses islands "
                        f"{by_id[link.a].island} and {by_id[link.b].island}",
                    )
                if link.pair in seen_wire_pairs:
                    raise NetSpecError(
                        "E_DUPLICATE_LINK", f"duplicate wire link between {link.a} and {link.b}"
                    )
                seen_wire_pairs.add(link.pair)

    def station(self, station_id: str) -> Station:
        for station in self.stations:
            if station.id == station_id:
                return station
        raise NetSpecError("E_UNKNOWN_STATION", f"no station named {station_id}")

    def station_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.stations)

    def wire_links(self) -> dict[tuple[str, str], Link]:
        return {l.pair: l for l in self.links if l.kind is LinkKind.WIRE}
