"""Independent oracles the test suite checks the simulator against.

Everything here is derived from first principles with its own arithmetic:
the mean-square of n i.i.d. Gaussian samples of variance v is distributed as
v * chi2(n) / n, so the level classifier can be Monte-Carloed directly from
chi-squared draws without touching the waveform pipeline being validated.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def classifier_oracle(
    n: int,
    trials: int,
    seed: int,
    r_low: float = 1000.0,
    r_high: float = 10000.0,
    a: float = 1e-6,
    guard: float = 0.05,
) -> dict:
    """Brute-force Monte Carlo of the mean-square level classifier.

    Draws fair resistor choices for both parties, samples the measured wire
    level as v_state * chi2(n)/n, applies the geometric-mean thresholds and
    guard band, and tallies what the two parties would decide.

    Returns rates over all trials:
      disagreement  both parties decide (different) mixed states,
      yield         confident, agreed mixed decision (a key bit),
      mixed_true    the drawn state really was mixed.
    """
    rng = np.random.default_rng(seed)
    u2_ll = a * r_low / 2.0
    u2_mixed = a * r_low * r_high / (r_low + r_high)
    u2_hh = a * r_high / 2.0
    t1 = math.sqrt(u2_ll * u2_mixed)
    t2 = math.sqrt(u2_mixed * u2_hh)

    alice = rng.integers(0, 2, size=trials)  # 0 = L, 1 = H
    bob = rng.integers(0, 2, size=trials)
    level = np.where(
        alice + bob == 0, u2_ll, np.where(alice + bob == 2, u2_hh, u2_mixed)
    )
    measured = level * rng.chisquare(n, size=trials) / n

    in_mixed_band = (measured >= t1) & (measured < t2)
    confident = (np.abs(measured - t1) > guard * t1) & (np.abs(measured - t2) > guard * t2)
    pure_truth = alice == bob

    # Same measurement for both parties: a mixed-band reading on a pure state
    # makes them name opposite mixed states; on a true mixed state each names
    # it correctly from their own resistor, so they agree.
    disagreement = in_mixed_band & pure_truth
    agreed_mixed = in_mixed_band & ~pure_truth
    return {
        "disagreement": float(np.mean(disagreement)),
        "disagreement_count": int(np.sum(disagreement)),
        "yield": float(np.mean(agreed_mixed & confident)),
        "mixed_true": float(np.mean(~pure_truth)),
        "trials": trials,
    }


def count_pairs_bruteforce(n: int) -> int:
    """Unordered station pairs by explicit enumeration."""
    return len(list(itertools.combinations(range(n), 2)))


def binomial_halfwidth(trials: int, z: float, p: float = 0.5) -> float:
    """z-sigma half-width of a binomial proportion around p."""
    return z * math.sqrt(p * (1.0 - p) / trials)
