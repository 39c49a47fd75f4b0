"""Eavesdropper models against a simulated link, plus the legitimate parties'
intrusion-detection protocol.

Eve taps the wire midpoint and sees exactly (u_wire, i_wire) — the strongest
passive position the ideal model admits.  Active attacks necessarily unbalance
the waveforms the two ends observe, which is what detection latches onto.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .link import (
    SUB_EVE,
    BepState,
    LinkConfig,
    bep_sources,
    decide_state,
    level_consistent,
    state_wire_variances,
    stream_index,
    wire_waveforms,
)
from .noise import SampleStream, _unchecked_stream, johnson_variance, make_rng, mean_square

# z-score for the zero-mean wire-voltage check; together with the level test
# this keeps the no-attack false-alarm rate safely under 1e-4 per period.
MEAN_TEST_SIGMAS = 5.0


@dataclass(frozen=True)
class PassiveListen:
    """Eve only records; waveforms are untouched."""


@dataclass(frozen=True)
class MitmSplit:
    """Eve cuts the wire and runs a full key-exchanger endpoint toward each party."""


@dataclass(frozen=True)
class CurrentInject:
    """Eve injects a current at the wire midpoint.

    waveform 'constant' injects a DC amplitude (A); 'gaussian' injects
    zero-mean noise with the amplitude as standard deviation.
    """

    amplitude: float
    waveform: str = "constant"

    def __post_init__(self) -> None:
        if not self.amplitude > 0:
            raise ValueError(f"injection amplitude must be positive, got {self.amplitude}")
        if self.waveform not in ("constant", "gaussian"):
            raise ValueError(f"waveform must be 'constant' or 'gaussian', got {self.waveform!r}")


Attack = Union[PassiveListen, MitmSplit, CurrentInject]


@dataclass(frozen=True)
class EveVerdict:
    guessed_bit: int
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class DetectionConfig:
    """Public-comparison intrusion detection parameters.

    reveal_fraction of each period's samples are published and compared;
    revealed samples are sacrificed from key material.
    """

    reveal_fraction: float = 0.1
    mismatch_tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if not 0.0 < self.reveal_fraction <= 1.0:
            raise ValueError(f"reveal_fraction must lie in (0, 1], got {self.reveal_fraction}")
        if self.mismatch_tolerance < 0:
            raise ValueError(f"mismatch_tolerance must be non-negative, got {self.mismatch_tolerance}")


@dataclass(frozen=True)
class BepInputs:
    """Source-side quantities of one period, before any attack touches the wire."""

    config: LinkConfig
    alice_choice: str
    bob_choice: str
    u_alice: SampleStream
    u_bob: SampleStream
    seed: int
    channel: int = 0
    index: int = 0


@dataclass(frozen=True)
class WireTap:
    u: SampleStream
    i: SampleStream


@dataclass(frozen=True)
class AttackedWaveforms:
    """Per-end observations after an attack; identical under passive listening."""

    alice: WireTap
    bob: WireTap
    eve: WireTap
    eve_choice_alice: Optional[str] = None  # mitm only: Eve's resistor toward Alice
    eve_choice_bob: Optional[str] = None


@dataclass(frozen=True)
class PartyRecord:
    """One party's view of one period, as fed to intrusion detection."""

    choice: str
    u_wire: SampleStream
    i_wire: SampleStream
    measured_u2: float
    decided_state: BepState
    confident: bool


@dataclass(frozen=True)
class AttackOutcome:
    true_state: BepState
    alice: PartyRecord
    bob: PartyRecord
    eve_verdict: EveVerdict
    detected: bool


def make_bep_inputs(
    config: LinkConfig,
    seed: int,
    *,
    channel: int = 0,
    index: int = 0,
    force_alice: Optional[str] = None,
    force_bob: Optional[str] = None,
) -> BepInputs:
    choice_a, choice_b, u_a, u_b = bep_sources(
        config,
        seed,
        channel=channel,
        index=index,
        force_alice=force_alice,
        force_bob=force_bob,
    )
    return BepInputs(
        config=config,
        alice_choice=choice_a,
        bob_choice=choice_b,
        u_alice=u_a,
        u_bob=u_b,
        seed=seed,
        channel=channel,
        index=index,
    )


def eve_passive_guess(
    u_wire: SampleStream, i_wire: SampleStream, config: LinkConfig
) -> EveVerdict:
    """Eve's best passive guess from the midpoint voltage and current.

    Gaussian log-likelihood comparison of the two mixed-state hypotheses.  In
    the ideal link both hypotheses give the same zero-mean law for (u, i) —
    voltage and current are uncorrelated in the mixed states — so the ratio is
    exactly zero and the verdict degenerates to a coin.
    """
    n = len(u_wire)
    if len(i_wire) != n:
        raise ValueError("voltage and current streams must have equal length")
    sum_u2 = float(u_wire.values @ u_wire.values)
    sum_i2 = float(i_wire.values @ i_wire.values)

    def loglik(variances: tuple[float, float]) -> float:
        vu, vi = variances
        return -0.5 * (
            n * math.log(2.0 * math.pi * vu)
            + sum_u2 / vu
            + n * math.log(2.0 * math.pi * vi)
            + sum_i2 / vi
        )

    llr = loglik(state_wire_variances(BepState.LH, config)) - loglik(
        state_wire_variances(BepState.HL, config)
    )
    guessed = 0 if llr >= 0 else 1
    confidence = 1.0 / (1.0 + math.exp(-abs(llr)))
    return EveVerdict(guessed_bit=guessed, confidence=confidence)


def apply_attack(attack: Attack, inputs: BepInputs) -> AttackedWaveforms:
    """Produce the per-end waveforms one period yields under an attack."""
    config = inputs.config
    r_a = config.resistor(inputs.alice_choice)
    r_b = config.resistor(inputs.bob_choice)

    if isinstance(attack, PassiveListen):
        u, i = wire_waveforms(inputs.u_alice, inputs.u_bob, r_a, r_b)
        tap = WireTap(u=u, i=i)
        return AttackedWaveforms(alice=tap, bob=tap, eve=tap)

    if isinstance(attack, MitmSplit):
        rng = make_rng(
            inputs.seed, stream_index(inputs.channel, inputs.index, SUB_EVE)
        )
        coin = rng.integers(0, 2, size=2)
        eve_a = ("L", "H")[coin[0]]
        eve_b = ("L", "H")[coin[1]]
        n = config.samples_per_bep
        dt = inputs.u_alice.dt
        noise_a = _unchecked_stream(
            math.sqrt(johnson_variance(config.resistor(eve_a), config.scale)) * rng.standard_normal(n),
            dt,
            inputs.seed,
        )
        noise_b = _unchecked_stream(
            math.sqrt(johnson_variance(config.resistor(eve_b), config.scale)) * rng.standard_normal(n),
            dt,
            inputs.seed,
        )
        u_a_wire, i_a_wire = wire_waveforms(inputs.u_alice, noise_a, r_a, config.resistor(eve_a))
        u_b_wire, i_b_wire = wire_waveforms(noise_b, inputs.u_bob, config.resistor(eve_b), r_b)
        return AttackedWaveforms(
            alice=WireTap(u=u_a_wire, i=i_a_wire),
            bob=WireTap(u=u_b_wire, i=i_b_wire),
            eve=WireTap(u=u_a_wire, i=i_a_wire),
            eve_choice_alice=eve_a,
            eve_choice_bob=eve_b,
        )

    if isinstance(attack, CurrentInject):
        u0, i0 = wire_waveforms(inputs.u_alice, inputs.u_bob, r_a, r_b)
        n = config.samples_per_bep
        if attack.waveform == "constant":
            injected = np.full(n, attack.amplitude)
        else:
            rng = make_rng(
                inputs.seed, stream_index(inputs.channel, inputs.index, SUB_EVE)
            )
            injected = attack.amplitude * rng.standard_normal(n)
        total = r_a + r_b
        parallel = r_a * r_b / total
        dt = u0.dt
        u = _unchecked_stream(u0.values + injected * parallel, dt, u0.rng_seed)
        # Injected current splits per the resistor divider; the two ends no
        # longer read the same current.
        i_alice = _unchecked_stream(i0.values - injected * (r_b / total), dt, u0.rng_seed)
        i_bob = _unchecked_stream(i0.values + injected * (r_a / total), dt, u0.rng_seed)
        return AttackedWaveforms(
            alice=WireTap(u=u, i=i_alice),
            bob=WireTap(u=u, i=i_bob),
            eve=WireTap(u=u, i=i_alice),
        )

    raise TypeError(f"unknown attack kind: {attack!r}")


def detect_intrusion(
    record_alice: PartyRecord,
    record_bob: PartyRecord,
    det: DetectionConfig,
    config: LinkConfig,
) -> bool:
    """Alarm decision for one period.

    Trips when (a) the publicly revealed sample prefixes disagree beyond the
    mismatch tolerance, (b) either party's measured level is implausible for
    every state compatible with its own resistor, or (c) a party's wire
    voltage mean strays from zero by more than MEAN_TEST_SIGMAS standard
    errors, which catches constant injection.
    """
    n = len(record_alice.u_wire)
    k = max(1, math.ceil(det.reveal_fraction * n))
    for mine, theirs in (
        (record_alice.u_wire.values[:k], record_bob.u_wire.values[:k]),
        (record_alice.i_wire.values[:k], record_bob.i_wire.values[:k]),
    ):
        reference = np.maximum(np.abs(mine), np.abs(theirs))
        if np.any(np.abs(mine - theirs) > det.mismatch_tolerance * np.maximum(reference, 1e-300)):
            return True

    for record in (record_alice, record_bob):
        if not level_consistent(record.measured_u2, record.choice, config):
            return True
        u = record.u_wire.values
        total = float(np.sum(u))
        mean = total / n
        variance = (float(u @ u) - n * mean * mean) / (n - 1)
        if abs(mean) > MEAN_TEST_SIGMAS * math.sqrt(max(variance, 0.0) / n):
            return True
    return False


def _party_record(choice: str, tap: WireTap, config: LinkConfig, party: str) -> PartyRecord:
    u2 = mean_square(tap.u)
    state, confident = decide_state(u2, choice, config, party=party)
    return PartyRecord(
        choice=choice,
        u_wire=tap.u,
        i_wire=tap.i,
        measured_u2=u2,
        decided_state=state,
        confident=confident,
    )


def _mitm_verdict(waveforms: AttackedWaveforms, config: LinkConfig) -> EveVerdict:
    # Eve is the far endpoint of Alice's wire: she knows her own resistor and
    # reads Alice's off the level, so her guess of Alice's bit is essentially
    # certain — the attack trades stealth for knowledge.
    state, confident = decide_state(
        mean_square(waveforms.eve.u), waveforms.eve_choice_alice, config, party="bob"
    )
    guessed = 0 if state.alice == "L" else 1
    return EveVerdict(guessed_bit=guessed, confidence=1.0 if confident else 0.5)


def run_attacked_bep(
    config: LinkConfig,
    attack: Attack,
    det: DetectionConfig,
    seed: int,
    *,
    channel: int = 0,
    index: int = 0,
    force_alice: Optional[str] = None,
    force_bob: Optional[str] = None,
) -> AttackOutcome:
    """One bit exchange period under an attack, with detection applied."""
    inputs = make_bep_inputs(
        config,
        seed,
        channel=channel,
        index=index,
        force_alice=force_alice,
        force_bob=force_bob,
    )
    waveforms = apply_attack(attack, inputs)
    alice = _party_record(inputs.alice_choice, waveforms.alice, config, "alice")
    bob = _party_record(inputs.bob_choice, waveforms.bob, config, "bob")
    if isinstance(attack, MitmSplit):
        verdict = _mitm_verdict(waveforms, config)
    else:
        verdict = eve_passive_guess(waveforms.eve.u, waveforms.eve.i, config)
    detected = detect_intrusion(alice, bob, det, config)
    return AttackOutcome(
        true_state=BepState(inputs.alice_choice + inputs.bob_choice),
        alice=alice,
        bob=bob,
        eve_verdict=verdict,
        detected=detected,
    )
