"""Flat line-oriented .net format for network specifications.

Grammar (one record per line, key=value fields, '#' starts a comment):

    station id=<name> island=<name> [kljn=yes|no] [qkd=yes|no] [units=<int>]
    link a=<id> b=<id> kind=wire|wireless|satellite length=<meters>
         [wires=<int>] [qkd=yes|no]
    defaults [rl=<ohm>] [rh=<ohm>] [scale=<V^2/ohm>] [velocity=<m/s>]
             [samples=<int>] [guard=<frac>]

Chosen over nested formats for diff-friendliness and line-anchored errors.
"""
from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Union

from .link import LinkConfig
from .netspec import Link, LinkKind, NetSpecError, NetworkSpec, Station
from .noise import NoiseScale

_BOOLS = {"yes": True, "no": False}


def _fields(tokens: list[str], path: str, line_no: int) -> dict[str, str]:
    out: dict[str, str] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not key or not value:
            raise NetSpecError("E_SYNTAX", f"expected key=value, got {token!r}", line_no, path)
        if key in out:
            raise NetSpecError("E_SYNTAX", f"duplicate field {key!r}", line_no, path)
        out[key] = value
    return out


def _take(fields: dict[str, str], key: str, path: str, line_no: int, required: bool = True) -> str:
    if key not in fields:
        if required:
            raise NetSpecError("E_SYNTAX", f"missing required field {key!r}", line_no, path)
        return ""
    return fields.pop(key)


def _parse_bool(raw: str, key: str, path: str, line_no: int) -> bool:
    if raw not in _BOOLS:
        raise NetSpecError("E_SYNTAX", f"{key} must be yes or no, got {raw!r}", line_no, path)
    return _BOOLS[raw]


def _parse_float(raw: str, key: str, path: str, line_no: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise NetSpecError("E_SYNTAX", f"{key} must be a number, got {raw!r}", line_no, path) from None


def _parse_int(raw: str, key: str, path: str, line_no: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise NetSpecError("E_SYNTAX", f"{key} must be an integer, got {raw!r}", line_no, path) from None


def parse_network_text(text: str, path: str = "<string>") -> NetworkSpec:
    """Stations must be declared before the links that reference them, so
    every validation error can point at its exact line."""
    stations: list[Station] = []
    by_id: dict[str, Station] = {}
    links: list[Link] = []
    wire_pairs: set[tuple[str, str]] = set()
    defaults = LinkConfig()
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        record, fields = tokens[0], _fields(tokens[1:], path, line_no)
        try:
            if record == "station":
                station = Station(
                    id=_take(fields, "id", path, line_no),
                    island=_take(fields, "island", path, line_no),
                    has_kljn=_parse_bool(fields.pop("kljn", "no"), "kljn", path, line_no),
                    has_qkd=_parse_bool(fields.pop("qkd", "no"), "qkd", path, line_no),
                    kljn_unit_budget=_parse_int(fields.pop("units", "0"), "units", path, line_no),
                )
                if station.id in by_id:
                    raise NetSpecError(
                        "E_DUPLICATE_STATION", f"station {station.id} declared twice", line_no, path
                    )
                stations.append(station)
                by_id[station.id] = station
            elif record == "link":
                kind_raw = _take(fields, "kind", path, line_no)
                try:
                    kind = LinkKind(kind_raw)
                except ValueError:
                    raise NetSpecError(
                        "E_SYNTAX", f"kind must be wire, wireless or satellite, got {kind_raw!r}",
                        line_no, path,
                    ) from None
                link = Link(
                    a=_take(fields, "a", path, line_no),
                    b=_take(fields, "b", path, line_no),
                    kind=kind,
                    length=_parse_float(_take(fields, "length", path, line_no), "length", path, line_no),
                    parallel_wires=_parse_int(fields.pop("wires", "1"), "wires", path, line_no),
                    qkd_equipped=_parse_bool(fields.pop("qkd", "no"), "qkd", path, line_no),
                )
                for end in (link.a, link.b):
                    if end not in by_id:
                        raise NetSpecError(
                            "E_UNKNOWN_STATION",
                            f"link references undeclared station {end}",
                            line_no,
                            path,
                        )
                if link.kind is LinkKind.WIRE:
                    if by_id[link.a].island != by_id[link.b].island:
                        raise NetSpecError(
                            "E_CROSS_ISLAND_WIRE",
                            f"wire link {link.a}-{link.b} crosses islands "
                            f"{by_id[link.a].island} and {by_id[link.b].island}",
                            line_no,
                            path,
                        )
                    if link.pair in wire_pairs:
                        raise NetSpecError(
                            "E_DUPLICATE_LINK",
                            f"duplicate wire link between {link.a} and {link.b}",
                            line_no,
                            path,
                        )
                    wire_pairs.add(link.pair)
                links.append(link)
            elif record == "defaults":
                replacements: dict = {}
                if "rl" in fields:
                    replacements["r_low"] = _parse_float(fields.pop("rl"), "rl", path, line_no)
                if "rh" in fields:
                    replacements["r_high"] = _parse_float(fields.pop("rh"), "rh", path, line_no)
                if "scale" in fields:
                    replacements["scale"] = NoiseScale(_parse_float(fields.pop("scale"), "scale", path, line_no))
                if "velocity" in fields:
                    replacements["wave_velocity"] = _parse_float(fields.pop("velocity"), "velocity", path, line_no)
                if "samples" in fields:
                    replacements["samples_per_bep"] = _parse_int(fields.pop("samples"), "samples", path, line_no)
                if "guard" in fields:
                    replacements["guard_fraction"] = _parse_float(fields.pop("guard"), "guard", path, line_no)
                defaults = dataclasses.replace(defaults, **replacements)
            else:
                raise NetSpecError("E_SYNTAX", f"unknown record type {record!r}", line_no, path)
        except NetSpecError as err:
            if err.line is None:
                raise NetSpecError(err.code, err.message, line_no, path) from None
            raise
        except ValueError as err:
            raise NetSpecError("E_BAD_FIELD", str(err), line_no, path) from None
        if fields:
            raise NetSpecError("E_SYNTAX", f"unknown field(s): {', '.join(sorted(fields))}", line_no, path)
    try:
        return NetworkSpec(stations=tuple(stations), links=tuple(links), kljn_defaults=defaults)
    except NetSpecError as err:
        raise NetSpecError(err.code, err.message, None, path) from None


def parse_network_spec(path: Union[str, Path]) -> NetworkSpec:
    """Parse and validate a .net file."""
    file_path = Path(path)
    return parse_network_text(file_path.read_text(), path=str(file_path))


def _bool_field(key: str, value: bool, default: bool = False) -> str:
    return "" if value == default else f" {key}={'yes' if value else 'no'}"


def serialize_network_spec(spec: NetworkSpec) -> str:
    """Render a NetworkSpec back to .net text; parsing the result round-trips."""
    lines: list[str] = []
    base = LinkConfig()
    d = spec.kljn_defaults
    parts = []
    if d.r_low != base.r_low:
        parts.append(f"rl={d.r_low!r}")
    if d.r_high != base.r_high:
        parts.append(f"rh={d.r_high!r}")
    if d.scale.a != base.scale.a:
        parts.append(f"scale={d.scale.a!r}")
    if d.wave_velocity != base.wave_velocity:
        parts.append(f"velocity={d.wave_velocity!r}")
    if d.samples_per_bep != base.samples_per_bep:
        parts.append(f"samples={d.samples_per_bep}")
    if d.guard_fraction != base.guard_fraction:
        parts.append(f"guard={d.guard_fraction!r}")
    if parts:
        lines.append("defaults " + " ".join(parts))
    for s in spec.stations:
        units = f" units={s.kljn_unit_budget}" if s.kljn_unit_budget else ""
        lines.append(
            f"station id={s.id} island={s.island}"
            + _bool_field("kljn", s.has_kljn)
            + _bool_field("qkd", s.has_qkd)
            + units
        )
    for l in spec.links:
        wires = f" wires={l.parallel_wires}" if l.parallel_wires != 1 else ""
        qkd = _bool_field("qkd", l.qkd_equipped)
        lines.append(f"link a={l.a} b={l.b} kind={l.kind.value} length={l.length!r}{wires}{qkd}")
    return "\n".join(lines) + "\n"
