"""Command-line front end: link simulation, attack evaluation, distribution
planning and reachability analysis.

Exit codes: 0 success, 1 alarm/abort, 2 usage error, 3 network spec error.
All randomness flows from the single --seed; reports carry the full manifest
as leading '#' lines so identical invocations produce byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import adversary, planner, security
from .link import LinkConfig, bep_duration, exchange_key, stream_index
from .netfile import parse_network_spec
from .netspec import NetSpecError
from .noise import NoiseScale, make_rng

EXIT_OK = 0
EXIT_ALARM = 1
EXIT_USAGE = 2
EXIT_SPEC = 3

# Offset separating the control run's RNG blocks from the attacked run's,
# and the channel the forced-state coins are drawn on.
CONTROL_INDEX_OFFSET = 1 << 32
FORCE_COIN_CHANNEL = 1 << 20


@dataclass(frozen=True)
class RunManifest:
    command: str
    seed: int
    out_dir: str
    input_path: str = ""
    params: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        # out_dir deliberately left out: equal (command, seed, input, params)
        # must yield byte-identical tables wherever they are written.
        out = [f"command={self.command}", f"seed={self.seed}"]
        if self.input_path:
            out.append(f"input={self.input_path}")
        for key in sorted(self.params):
            out.append(f"{key}={self.params[key]}")
        return out


def write_table(path: Path, manifest: RunManifest, header: Sequence[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for line in manifest.lines():
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _binomial_ci(hits: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    p = hits / trials
    half = z * math.sqrt(max(p * (1.0 - p), 1e-12) / trials)
    return max(0.0, p - half), min(1.0, p + half)


def _link_config(args: argparse.Namespace) -> LinkConfig:
    return LinkConfig(
        r_low=args.rl,
        r_high=args.rh,
        scale=NoiseScale(args.scale),
        length=args.length,
        samples_per_bep=args.samples,
        parallel_wires=args.wires,
        guard_fraction=args.guard,
    )


def cmd_simulate_link(args: argparse.Namespace) -> int:
    try:
        config = _link_config(args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    result = exchange_key(config, args.key_bits, args.seed)
    manifest = RunManifest(
        command="simulate-link",
        seed=args.seed,
        out_dir=args.out_dir,
        params={
            "rl": args.rl, "rh": args.rh, "length": args.length,
            "key_bits": args.key_bits, "samples": args.samples,
            "wires": args.wires, "scale": args.scale, "guard": args.guard,
        },
    )
    discard_rate = result.discarded / result.beps_used if result.beps_used else 0.0
    write_table(
        Path(args.out_dir) / "exchange.csv",
        manifest,
        [
            "key_bits_exchanged", "beps_used", "discarded", "discard_rate",
            "alarms", "bep_duration_s", "ideal_time_s", "elapsed_time_s", "key",
        ],
        [[
            len(result.key_bits), result.beps_used, result.discarded, discard_rate,
            result.alarms, bep_duration(config.length, config.wave_velocity),
            result.ideal_time, result.elapsed_time,
            "".join(str(b) for b in result.key_bits),
        ]],
    )
    print(f"exchanged {len(result.key_bits)}/{args.key_bits} bits "
          f"in {result.beps_used} periods ({result.discarded} discarded)")
    print(f"ideal_time = {result.ideal_time} s, elapsed_time = {result.elapsed_time} s "
          f"over {args.wires} wire(s)")
    if result.alarms:
        print(f"ALARM: exchange aborted after {result.beps_used} periods", file=sys.stderr)
        return EXIT_ALARM
    return EXIT_OK


def _make_attack(args: argparse.Namespace) -> adversary.Attack:
    if args.attack == "passive":
        return adversary.PassiveListen()
    if args.attack == "mitm":
        return adversary.MitmSplit()
    return adversary.CurrentInject(amplitude=args.amplitude, waveform=args.waveform)


def cmd_eavesdrop(args: argparse.Namespace) -> int:
    try:
        config = _link_config(args)
        attack = _make_attack(args)
        det = adversary.DetectionConfig(
            reveal_fraction=args.reveal_fraction,
            mismatch_tolerance=args.mismatch_tolerance,
        )
        if args.trials < 1:
            raise ValueError(f"trials must be at least 1, got {args.trials}")
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE

    hits = 0
    flagged = 0
    coins = make_rng(args.seed, stream_index(FORCE_COIN_CHANNEL, 0, 0)).integers(
        0, 2, size=args.trials
    )
    for t in range(args.trials):
        # Force a mixed state so every trial carries a definite key bit.
        forced = ("L", "H") if coins[t] == 0 else ("H", "L")
        outcome = adversary.run_attacked_bep(
            config, attack, det, args.seed, index=t,
            force_alice=forced[0], force_bob=forced[1],
        )
        true_bit = 0 if forced[0] == "L" else 1
        if outcome.eve_verdict.guessed_bit == true_bit:
            hits += 1
        if outcome.detected:
            flagged += 1
    false_alarms = 0
    for t in range(args.trials):
        forced = ("L", "H") if coins[t] == 0 else ("H", "L")
        control = adversary.run_attacked_bep(
            config, adversary.PassiveListen(), det, args.seed,
            index=CONTROL_INDEX_OFFSET + t,
            force_alice=forced[0], force_bob=forced[1],
        )
        if control.detected:
            false_alarms += 1

    accuracy = hits / args.trials
    ci_low, ci_high = _binomial_ci(hits, args.trials)
    detection_rate = flagged / args.trials
    false_alarm_rate = false_alarms / args.trials
    manifest = RunManifest(
        command="eavesdrop",
        seed=args.seed,
        out_dir=args.out_dir,
        params={
            "attack": args.attack, "trials": args.trials,
            "amplitude": args.amplitude, "waveform": args.waveform,
            "reveal_fraction": args.reveal_fraction,
            "rl": args.rl, "rh": args.rh, "length": args.length,
            "samples": args.samples, "scale": args.scale,
        },
    )
    write_table(
        Path(args.out_dir) / "eavesdrop.csv",
        manifest,
        ["attack", "trials", "eve_accuracy", "accuracy_ci_low", "accuracy_ci_high",
         "detection_rate", "false_alarm_rate"],
        [[args.attack, args.trials, accuracy, ci_low, ci_high, detection_rate, false_alarm_rate]],
    )
    print(f"attack={args.attack}: Eve accuracy {accuracy:.4f} "
          f"(95% CI [{ci_low:.4f}, {ci_high:.4f}]) over {args.trials} mixed periods")
    print(f"detection rate {detection_rate:.4f}, false-alarm rate {false_alarm_rate:.4f}")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    try:
        spec = parse_network_spec(args.spec)
    except FileNotFoundError:
        print(f"error: spec file not found: {args.spec}", file=sys.stderr)
        return EXIT_SPEC
    except NetSpecError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SPEC
    try:
        if args.mode == "mesh":
            plan = planner.plan_full_mesh(spec, args.key_bits)
        elif args.mode == "star":
            if not args.center:
                print("error: --mode star requires --center", file=sys.stderr)
                return EXIT_USAGE
            plan = planner.plan_star(spec, args.center, args.key_bits)
        else:
            if not args.order:
                print("error: --mode line requires --order a,b,c,...", file=sys.stderr)
                return EXIT_USAGE
            plan = planner.plan_line(spec, [s.strip() for s in args.order.split(",")], args.key_bits)
    except (planner.PlanError, NetSpecError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SPEC

    rows, summary = planner.plan_time_summary(plan)
    manifest = RunManifest(
        command="plan",
        seed=args.seed,
        out_dir=args.out_dir,
        input_path=str(args.spec),
        params={
            "mode": args.mode, "key_bits": args.key_bits,
            "center": args.center or "", "order": args.order or "",
        },
    )
    write_table(
        Path(args.out_dir) / "plan_rounds.csv",
        manifest,
        ["round", "pairs", "bye", "duration_s"],
        [[r["round"], r["pairs"], r["bye"], r["duration_s"]] for r in rows],
    )
    write_table(
        Path(args.out_dir) / "plan_summary.csv",
        manifest,
        list(summary.keys()),
        [list(summary.values())],
    )
    if plan.link_loads:
        write_table(
            Path(args.out_dir) / "plan_link_loads.csv",
            manifest,
            ["a", "b", "length_m", "demand_bits", "busy_time_s"],
            [[l.a, l.b, l.length, l.demand_bits, l.busy_time] for l in plan.link_loads],
        )
    print(f"{plan.mode}: {len(plan.rounds)} round(s), "
          f"M = {plan.kljn_units_required} units, W = {plan.wires_required} wires")
    print(f"total_time ideal = {summary['total_time_ideal_s']} s, "
          f"effective = {summary['total_time_effective_s']} s ({summary['effective_model']})")
    return EXIT_OK


def cmd_reach(args: argparse.Namespace) -> int:
    try:
        spec = parse_network_spec(args.spec)
    except FileNotFoundError:
        print(f"error: spec file not found: {args.spec}", file=sys.stderr)
        return EXIT_SPEC
    except NetSpecError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SPEC
    report = security.classify_pairs(spec, kappa=args.kappa, beta=args.beta)
    manifest = RunManifest(
        command="reach",
        seed=args.seed,
        out_dir=args.out_dir,
        input_path=str(args.spec),
        params={"kappa": args.kappa, "beta": args.beta},
    )
    write_table(
        Path(args.out_dir) / "pairs.csv",
        manifest,
        ["a", "b", "class"],
        [[a, b, cls.value] for (a, b), cls in sorted(report.pair_classes.items())],
    )
    write_table(
        Path(args.out_dir) / "components.csv",
        manifest,
        ["component", "station"],
        [
            [idx, station]
            for idx, comp in enumerate(report.components, start=1)
            for station in sorted(comp)
        ],
    )
    write_table(
        Path(args.out_dir) / "trust.csv",
        manifest,
        ["station", "trust"],
        [[s, report.trust[s]] for s in sorted(report.trust)],
    )
    counts = {cls: 0 for cls in security.SecurityClass}
    for cls in report.pair_classes.values():
        counts[cls] += 1
    print(f"{len(spec.stations)} stations, {len(report.components)} unconditional component(s)")
    print(
        f"pairs: {counts[security.SecurityClass.UNCONDITIONAL]} unconditional, "
        f"{counts[security.SecurityClass.CONDITIONAL]} conditional, "
        f"{counts[security.SecurityClass.NONE]} unreachable"
    )
    return EXIT_OK


def _add_link_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rl", type=float, default=1000.0, help="low resistor, ohms")
    p.add_argument("--rh", type=float, default=10000.0, help="high resistor, ohms")
    p.add_argument("--length", type=float, default=1000.0, help="wire length, m")
    p.add_argument("--samples", type=int, default=100, help="samples per bit exchange period")
    p.add_argument("--wires", type=int, default=1, help="parallel wire pairs")
    p.add_argument("--scale", type=float, default=1e-6, help="noise intensity a, V^2/ohm")
    p.add_argument("--guard", type=float, default=0.05, help="guard band fraction around thresholds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kljnsim",
        description="Simulate KLJN key-exchange links and plan key-distribution networks.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("simulate-link", help="run one key exchange on a simulated link")
    _add_link_flags(p)
    p.add_argument("--key-bits", type=int, default=256, help="key length to exchange")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_simulate_link)

    p = sub.add_parser("eavesdrop", help="evaluate an attack against the link")
    _add_link_flags(p)
    p.add_argument("--attack", choices=["passive", "mitm", "inject"], required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--amplitude", type=float, default=1e-3, help="injected current, A")
    p.add_argument("--waveform", choices=["constant", "gaussian"], default="constant")
    p.add_argument("--reveal-fraction", type=float, default=0.1)
    p.add_argument("--mismatch-tolerance", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_eavesdrop)

    p = sub.add_parser("plan", help="plan a key-distribution schedule for a network")
    p.add_argument("spec", help=".net network specification file")
    p.add_argument("--mode", choices=["mesh", "star", "line"], required=True)
    p.add_argument("--key-bits", type=int, default=256)
    p.add_argument("--center", default=None, help="exchange station id (star mode)")
    p.add_argument("--order", default=None, help="comma-separated station order (line mode)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("reach", help="classify pair security and station trust")
    p.add_argument("spec", help=".net network specification file")
    p.add_argument("--kappa", type=float, default=2.0, help="trust saturation constant")
    p.add_argument("--beta", type=float, default=0.5, help="satellite edge weight in trust")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_reach)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
