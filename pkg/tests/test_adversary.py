import math

import numpy as np
import pytest

from kljnsim.adversary import (
    CurrentInject,
    DetectionConfig,
    EveVerdict,
    MitmSplit,
    PassiveListen,
    apply_attack,
    detect_intrusion,
    eve_passive_guess,
    make_bep_inputs,
    run_attacked_bep,
)
from kljnsim.link import LinkConfig, run_bep, wire_waveforms
from kljnsim.noise import SampleStream

CFG = LinkConfig()
DET = DetectionConfig()


def forced(t, coin):
    return ("L", "H") if coin[t] == 0 else ("H", "L")


def mixed_coins(n, seed=314):
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=n)


# --- attack kinds -------------------------------------------------------------


def test_current_inject_validation():
    with pytest.raises(ValueError):
        CurrentInject(amplitude=0.0)
    with pytest.raises(ValueError):
        CurrentInject(amplitude=-1e-3)
    with pytest.raises(ValueError):
        CurrentInject(amplitude=1e-3, waveform="sawtooth")


def test_eve_verdict_confidence_bounds():
    with pytest.raises(ValueError):
        EveVerdict(guessed_bit=0, confidence=1.5)


def test_detection_config_validation():
    with pytest.raises(ValueError):
        DetectionConfig(reveal_fraction=0.0)
    with pytest.raises(ValueError):
        DetectionConfig(mismatch_tolerance=-1.0)


# --- passive ------------------------------------------------------------------


def test_passive_waveforms_match_plain_run():
    inputs = make_bep_inputs(CFG, seed=41, index=9)
    waveforms = apply_attack(PassiveListen(), inputs)
    record = run_bep(CFG, seed=41, index=9)
    u, i = wire_waveforms(
        inputs.u_alice, inputs.u_bob,
        CFG.resistor(inputs.alice_choice), CFG.resistor(inputs.bob_choice),
    )
    assert np.array_equal(waveforms.alice.u.values, u.values)
    assert np.array_equal(waveforms.bob.i.values, i.values)
    assert record.measured_u2 == pytest.approx(float(u.values @ u.values) / len(u))


def test_eve_zero_streams_confidence_half():
    zeros = SampleStream(np.zeros(100), dt=1.0)
    verdict = eve_passive_guess(zeros, zeros, CFG)
    assert verdict.confidence == 0.5


def test_eve_passive_accuracy_is_a_coin():
    trials = 4000
    coin = mixed_coins(trials)
    hits = 0
    for t in range(trials):
        fa, fb = forced(t, coin)
        out = run_attacked_bep(CFG, PassiveListen(), DET, 2718, index=t,
                               force_alice=fa, force_bob=fb)
        hits += out.eve_verdict.guessed_bit == (0 if fa == "L" else 1)
    # 4-sigma binomial band around a fair coin
    assert abs(hits / trials - 0.5) < 4.0 * math.sqrt(0.25 / trials)


def test_detection_soundness_passive():
    coin = mixed_coins(3000)
    for t in range(3000):
        fa, fb = forced(t, coin)
        out = run_attacked_bep(CFG, PassiveListen(), DET, 1009, index=t,
                               force_alice=fa, force_bob=fb)
        assert not out.detected


# --- mitm ----------------------------------------------------------------------


def test_mitm_wires_are_independent():
    # pooled sample correlation between the two wire segments
    ua, ub = [], []
    for t in range(200):
        inputs = make_bep_inputs(CFG, seed=55, index=t, force_alice="L", force_bob="H")
        waveforms = apply_attack(MitmSplit(), inputs)
        ua.append(waveforms.alice.u.values)
        ub.append(waveforms.bob.u.values)
    x = np.concatenate(ua)
    y = np.concatenate(ub)
    n = x.size
    corr = float(np.dot(x - x.mean(), y - y.mean()) / (n * x.std() * y.std()))
    assert abs(corr) < 5.0 / math.sqrt(n)


def test_mitm_detected_within_one_period():
    coin = mixed_coins(500)
    detected = 0
    for t in range(500):
        fa, fb = forced(t, coin)
        out = run_attacked_bep(CFG, MitmSplit(), DET, 77, index=t,
                               force_alice=fa, force_bob=fb)
        detected += out.detected
    assert detected / 500 >= 0.99


# --- injection -------------------------------------------------------------------


def test_constant_injection_shifts_wire_voltage():
    cfg = LinkConfig(r_low=1000.0, r_high=2000.0)
    inputs = make_bep_inputs(cfg, seed=6, index=0, force_alice="L", force_bob="L")
    waveforms = apply_attack(CurrentInject(amplitude=1e-3), inputs)
    # R_A = R_B = 1 kOhm: both ends shift by I * (R_A || R_B) = 0.5 V
    baseline = apply_attack(PassiveListen(), inputs)
    shift = waveforms.alice.u.values - baseline.alice.u.values
    assert np.allclose(shift, 0.5)
    assert np.array_equal(waveforms.alice.u.values, waveforms.bob.u.values)


def test_injection_splits_current_per_divider():
    inputs = make_bep_inputs(CFG, seed=6, index=1, force_alice="L", force_bob="H")
    waveforms = apply_attack(CurrentInject(amplitude=1e-3), inputs)
    baseline = apply_attack(PassiveListen(), inputs)
    total = CFG.r_low + CFG.r_high
    d_alice = waveforms.alice.i.values - baseline.alice.i.values
    d_bob = waveforms.bob.i.values - baseline.bob.i.values
    assert np.allclose(d_alice, -1e-3 * CFG.r_high / total)
    assert np.allclose(d_bob, 1e-3 * CFG.r_low / total)
    assert np.allclose(d_bob - d_alice, 1e-3)


def test_constant_injection_detected_immediately():
    coin = mixed_coins(100)
    for t in range(100):
        fa, fb = forced(t, coin)
        out = run_attacked_bep(CFG, CurrentInject(amplitude=1e-3), DET, 8, index=t,
                               force_alice=fa, force_bob=fb)
        assert out.detected


def test_gaussian_injection_detected():
    out = run_attacked_bep(CFG, CurrentInject(amplitude=1e-3, waveform="gaussian"),
                           DET, 8, index=0, force_alice="L", force_bob="H")
    assert out.detected


# --- detection internals ---------------------------------------------------------


def test_detect_intrusion_flags_revealed_mismatch():
    inputs = make_bep_inputs(CFG, seed=70, index=0, force_alice="L", force_bob="H")
    honest = apply_attack(PassiveListen(), inputs)

    from kljnsim.adversary import _party_record

    alice = _party_record(inputs.alice_choice, honest.alice, CFG, "alice")
    assert not detect_intrusion(alice, _party_record(inputs.bob_choice, honest.bob, CFG, "bob"), DET, CFG)

    tampered_values = honest.bob.u.values.copy()
    tampered_values[0] *= 1.001
    tampered = _party_record(
        inputs.bob_choice,
        type(honest.bob)(u=SampleStream(tampered_values, dt=honest.bob.u.dt), i=honest.bob.i),
        CFG,
        "bob",
    )
    assert detect_intrusion(alice, tampered, DET, CFG)
