"""Single KLJN link simulation: resistor states, wire waveforms, level
decisions, bit extraction and the quasi-static timing model.

Conventions used throughout:
  * States are named Alice-first: LH means Alice connected R_low, Bob R_high.
  * Bit mapping is the fixed public convention LH -> 0, HL -> 1.
  * Wire current is positive flowing from Alice toward Bob.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple, Optional

from .noise import (
    DEFAULT_SCALE,
    NoiseScale,
    SampleStream,
    _unchecked_stream,
    johnson_variance,
    make_rng,
)

# Sub-stream indices hanging off one (seed, channel, bep) address: SUB_MAIN
# feeds the legitimate parties' randomness, SUB_EVE an attacker's.
SUB_MAIN = 0
SUB_EVE = 1


def stream_index(channel: int, index: int, sub: int) -> int:
    """Pack a (channel, bep index, substream) address into one RNG stream id."""
    if channel < 0 or index < 0 or not 0 <= sub < 8:
        raise ValueError("invalid stream address")
    return (((channel << 44) | index) << 3) | sub


@dataclass(frozen=True)
class LinkConfig:
    """Physical and decision parameters of one KLJN link.

    alarm_margin is the number of relative standard errors (v*sqrt(2/n) for a
    level v) beyond which a measured level counts as incompatible with a
    party's own resistor choice; calibrated so that no-attack runs stay
    alarm-free while gross manipulation trips immediately.
    """

    r_low: float = 1000.0
    r_high: float = 10000.0
    scale: NoiseScale = DEFAULT_SCALE
    length: float = 1000.0
    wave_velocity: float = 2e8
    samples_per_bep: int = 100
    parallel_wires: int = 1
    guard_fraction: float = 0.05
    alarm_margin: float = 6.0

    def __post_init__(self) -> None:
        if not 0 < self.r_low < self.r_high:
            raise ValueError(
                f"need 0 < r_low < r_high, got r_low={self.r_low}, r_high={self.r_high}"
            )
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if not self.wave_velocity > 0:
            raise ValueError(f"wave velocity must be positive, got {self.wave_velocity}")
        if self.samples_per_bep < 2:
            raise ValueError(f"samples_per_bep must be at least 2, got {self.samples_per_bep}")
        if self.parallel_wires < 1:
            raise ValueError(f"parallel_wires must be at least 1, got {self.parallel_wires}")
        if not 0 <= self.guard_fraction < 0.5:
            raise ValueError(f"guard_fraction must lie in [0, 0.5), got {self.guard_fraction}")
        if not self.alarm_margin > 0:
            raise ValueError(f"alarm_margin must be positive, got {self.alarm_margin}")

    def resistor(self, choice: str) -> float:
        if choice == "L":
            return self.r_low
        if choice == "H":
            return self.r_high
        raise ValueError(f"resistor choice must be 'L' or 'H', got {choice!r}")


class BepState(Enum):
    """Joint resistor state of one bit exchange period, Alice letter first."""

    LL = "LL"
    LH = "LH"
    HL = "HL"
    HH = "HH"

    @property
    def mixed(self) -> bool:
        return self in (BepState.LH, BepState.HL)

    @property
    def alice(self) -> str:
        return self.value[0]

    @property
    def bob(self) -> str:
        return self.value[1]


STATE_BITS = {BepState.LH: 0, BepState.HL: 1}


@dataclass(frozen=True)
class BepRecord:
    """Everything one bit exchange period produced, both parties' view included."""

    alice_choice: str
    bob_choice: str
    measured_u2: float
    measured_i2: float
    measured_ui: float
    decided_state_alice: BepState
    decided_state_bob: BepState
    bit: Optional[int]  # None when the period is discarded
    alarm: bool


@dataclass(frozen=True)
class KeyExchangeResult:
    key_bits: tuple[int, ...]
    beps_used: int
    discarded: int
    elapsed_time: float
    alarms: int
    ideal_time: float


# --- timing model -----------------------------------------------------------


def noise_bandwidth(length: float, wave_velocity: float) -> float:
    """Usable noise bandwidth: 10% of the half-wave resonance c/(2L).

    Written as c/(20 L) so that samples_per_bep / noise_bandwidth reproduces
    bep_duration to the last bit at the canonical 100-sample setting.
    """
    if not length > 0:
        raise ValueError(f"length must be positive, got {length}")
    if not wave_velocity > 0:
        raise ValueError(f"wave velocity must be positive, got {wave_velocity}")
    return wave_velocity / (20.0 * length)


def bep_duration(length: float, wave_velocity: float) -> float:
    """Best-case duration of one bit exchange period: 2000 L / c."""
    if not length > 0:
        raise ValueError(f"length must be positive, got {length}")
    if not wave_velocity > 0:
        raise ValueError(f"wave velocity must be positive, got {wave_velocity}")
    return 2000.0 * length / wave_velocity


def key_time(key_length: int, length: float, wave_velocity: float) -> float:
    """Ideal time to exchange a K-bit key at one bit per period: 2000 K L / c.

    Discard overhead is on purpose not included here; exchange_key reports the
    effective figure alongside this ideal one.
    """
    if key_length < 1:
        raise ValueError(f"key length must be at least 1, got {key_length}")
    return 2000.0 * key_length * length / wave_velocity


# --- circuit solution -------------------------------------------------------


def _divider(ua, ub, r_a: float, r_b: float):
    total = r_a + r_b
    return (ua * r_b + ub * r_a) / total, (ua - ub) / total


def wire_waveforms(
    u_a: SampleStream, u_b: SampleStream, r_a: float, r_b: float
) -> tuple[SampleStream, SampleStream]:
    """Quasi-static Kirchhoff solution of the two-generator loop.

    u_wire = (u_a*r_b + u_b*r_a) / (r_a + r_b)
    i_wire = (u_a - u_b) / (r_a + r_b), positive from Alice toward Bob.
    """
    if r_a <= 0 or r_b <= 0:
        raise ValueError("resistances must be positive")
    if len(u_a) != len(u_b):
        raise ValueError(f"stream lengths differ: {len(u_a)} vs {len(u_b)}")
    u, i = _divider(u_a.values, u_b.values, r_a, r_b)
    return (
        _unchecked_stream(u, u_a.dt, u_a.rng_seed),
        _unchecked_stream(i, u_a.dt, u_a.rng_seed),
    )


class ExpectedLevels(NamedTuple):
    u2_ll: float
    u2_mixed: float
    u2_hh: float
    i2_ll: float
    i2_mixed: float
    i2_hh: float


@lru_cache(maxsize=None)
def expected_levels(config: LinkConfig) -> ExpectedLevels:
    """Analytic mean-square wire levels for the three distinguishable states.

    <U_w^2> = a * (R_A || R_B) and <I_w^2> = a / (R_A + R_B); the two mixed
    states share one level by construction, which is the whole security story.
    """
    a = config.scale.a
    rl, rh = config.r_low, config.r_high
    return ExpectedLevels(
        u2_ll=a * rl / 2.0,
        u2_mixed=a * rl * rh / (rl + rh),
        u2_hh=a * rh / 2.0,
        i2_ll=a / (2.0 * rl),
        i2_mixed=a / (rl + rh),
        i2_hh=a / (2.0 * rh),
    )


def state_wire_variances(state: BepState, config: LinkConfig) -> tuple[float, float]:
    """(voltage, current) wire variances implied by a full state."""
    r_a = config.resistor(state.alice)
    r_b = config.resistor(state.bob)
    a = config.scale.a
    return a * r_a * r_b / (r_a + r_b), a / (r_a + r_b)


@lru_cache(maxsize=None)
def decision_thresholds(config: LinkConfig) -> tuple[float, float]:
    """Geometric-mean voltage thresholds between adjacent expected levels."""
    levels = expected_levels(config)
    return (
        math.sqrt(levels.u2_ll * levels.u2_mixed),
        math.sqrt(levels.u2_mixed * levels.u2_hh),
    )


def _band_and_guard(measured_u2: float, config: LinkConfig) -> tuple[str, bool]:
    t1, t2 = decision_thresholds(config)
    guard = config.guard_fraction
    confident = (
        abs(measured_u2 - t1) > guard * t1 and abs(measured_u2 - t2) > guard * t2
    )
    if measured_u2 < t1:
        return "low", confident
    if measured_u2 >= t2:
        return "high", confident
    return "mixed", confident


_MIXED_NAME = {
    ("alice", "L"): BepState.LH,
    ("alice", "H"): BepState.HL,
    ("bob", "L"): BepState.HL,
    ("bob", "H"): BepState.LH,
}


def decide_state(
    measured_u2: float,
    own_choice: str,
    config: LinkConfig,
    party: str = "alice",
) -> tuple[BepState, bool]:
    """Classify a measured wire level and name the full two-party state.

    The level is banded by the geometric-mean thresholds; a mixed band is
    resolved into LH or HL using the caller's own resistor choice, with
    `party` fixing which position that choice occupies (states are named
    Alice-first).  Pure bands name LL/HH regardless of the own choice, so an
    impossible reading stays visible to the alarm logic instead of being
    papered over.  confident is False within guard_fraction (relative) of
    either threshold; such periods are discarded by callers.
    """
    if measured_u2 < 0:
        raise ValueError(f"measured level must be non-negative, got {measured_u2}")
    if own_choice not in ("L", "H"):
        raise ValueError(f"own choice must be 'L' or 'H', got {own_choice!r}")
    if party not in ("alice", "bob"):
        raise ValueError(f"party must be 'alice' or 'bob', got {party!r}")
    band, confident = _band_and_guard(measured_u2, config)
    if band == "low":
        return BepState.LL, confident
    if band == "high":
        return BepState.HH, confident
    return _MIXED_NAME[(party, own_choice)], confident


@lru_cache(maxsize=None)
def _alarm_bands(config: LinkConfig) -> dict:
    # Per own-choice acceptance intervals: within alarm_margin relative
    # standard errors of at least one compatible level.
    levels = expected_levels(config)
    spread = config.alarm_margin * math.sqrt(2.0 / config.samples_per_bep)
    out = {}
    for choice, candidates in (
        ("L", (levels.u2_ll, levels.u2_mixed)),
        ("H", (levels.u2_mixed, levels.u2_hh)),
    ):
        out[choice] = tuple((v * (1.0 - spread), v * (1.0 + spread)) for v in candidates)
    return out


def level_consistent(measured_u2: float, own_choice: str, config: LinkConfig) -> bool:
    """Whether a measured level is plausible for some state containing own_choice.

    Plausible means within alarm_margin relative standard errors of at least
    one compatible expected level; anything farther is treated as intrusion.
    """
    if own_choice not in ("L", "H"):
        raise ValueError(f"own choice must be 'L' or 'H', got {own_choice!r}")
    return any(
        lo <= measured_u2 <= hi for lo, hi in _alarm_bands(config)[own_choice]
    )


# --- running periods --------------------------------------------------------


def bep_sources(
    config: LinkConfig,
    seed: int,
    *,
    channel: int = 0,
    index: int = 0,
    force_alice: Optional[str] = None,
    force_bob: Optional[str] = None,
) -> tuple[str, str, SampleStream, SampleStream]:
    """Resistor choices and generator noise feeding one bit exchange period.

    All of the period's randomness comes from the single counter-addressed
    block (seed, channel, index, SUB_MAIN): two choice coins, then Alice's
    samples, then Bob's.  Forcing a choice does not shift the sample draws.
    """
    rng = make_rng(seed, stream_index(channel, index, SUB_MAIN))
    coin = rng.integers(0, 2, size=2)
    choice_a = force_alice if force_alice is not None else ("L", "H")[coin[0]]
    choice_b = force_bob if force_bob is not None else ("L", "H")[coin[1]]
    n = config.samples_per_bep
    dt = 1.0 / noise_bandwidth(config.length, config.wave_velocity)
    u_a = math.sqrt(johnson_variance(config.resistor(choice_a), config.scale)) * rng.standard_normal(n)
    u_b = math.sqrt(johnson_variance(config.resistor(choice_b), config.scale)) * rng.standard_normal(n)
    return (
        choice_a,
        choice_b,
        _unchecked_stream(u_a, dt, seed),
        _unchecked_stream(u_b, dt, seed),
    )


def run_bep(
    config: LinkConfig,
    seed: int,
    *,
    channel: int = 0,
    index: int = 0,
    force_alice: Optional[str] = None,
    force_bob: Optional[str] = None,
) -> BepRecord:
    """Run one bit exchange period end to end.

    A bit comes out only when both parties confidently decide the same mixed
    state; pure or guarded periods are discarded.  The alarm flag trips when
    the shared wire level is implausible for either party's own choice.
    """
    choice_a, choice_b, u_a, u_b = bep_sources(
        config,
        seed,
        channel=channel,
        index=index,
        force_alice=force_alice,
        force_bob=force_bob,
    )
    u, i = _divider(
        u_a.values, u_b.values, config.resistor(choice_a), config.resistor(choice_b)
    )
    n = u.size
    u2 = float(u @ u) / n
    i2 = float(i @ i) / n
    ui = float(u @ i) / n
    band, confident = _band_and_guard(u2, config)
    if band == "low":
        state_a = state_b = BepState.LL
    elif band == "high":
        state_a = state_b = BepState.HH
    else:
        state_a = _MIXED_NAME[("alice", choice_a)]
        state_b = _MIXED_NAME[("bob", choice_b)]
    alarm = not (
        level_consistent(u2, choice_a, config)
        and level_consistent(u2, choice_b, config)
    )
    bit: Optional[int] = None
    if not alarm and confident and state_a is state_b and state_a.mixed:
        bit = STATE_BITS[state_a]
    return BepRecord(
        alice_choice=choice_a,
        bob_choice=choice_b,
        measured_u2=u2,
        measured_i2=i2,
        measured_ui=ui,
        decided_state_alice=state_a,
        decided_state_bob=state_b,
        bit=bit,
        alarm=alarm,
    )


def exchange_key(config: LinkConfig, key_length: int, seed: int) -> KeyExchangeResult:
    """Run periods until key_length agreed bits accumulate.

    Periods are dealt round-robin over the parallel wires (period g runs on
    channel g mod parallel_wires); every period draws from its own
    counter-addressed RNG block, so the randomness consumed does not depend
    on the wire count and the parallel speedup is purely slot arithmetic.
    An alarm aborts the exchange with whatever key material was agreed so far.
    """
    if key_length < 1:
        raise ValueError(f"key length must be at least 1, got {key_length}")
    tau = bep_duration(config.length, config.wave_velocity)
    bits: list[int] = []
    discarded = 0
    alarms = 0
    used = 0
    while len(bits) < key_length:
        record = run_bep(config, seed, index=used)
        used += 1
        if record.alarm:
            alarms += 1
            break
        if record.bit is None:
            discarded += 1
        else:
            bits.append(record.bit)
    slots = math.ceil(used / config.parallel_wires)
    return KeyExchangeResult(
        key_bits=tuple(bits),
        beps_used=used,
        discarded=discarded,
        elapsed_time=slots * tau,
        alarms=alarms,
        ideal_time=key_time(key_length, config.length, config.wave_velocity),
    )
