"""Band-limited Johnson-noise sample streams and the estimators built on them.

The noise model is deliberately simple: one independent Gaussian sample per
correlation interval 1/B.  All absolute levels hang off a single intensity
knob `a` (V^2/Ohm), the 4*k*T_eff*B product collapsed into one scalar, since
only level ratios matter to the protocol.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_KEY_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseScale:
    """Noise intensity a in V^2/Ohm; mean-square resistor voltage is a*R."""

    a: float = 1e-6

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"noise scale must be positive and finite, got {self.a}")


DEFAULT_SCALE = NoiseScale()


@dataclass(frozen=True, eq=False)
class SampleStream:
    """Immutable sequence of voltage/current samples at a fixed interval."""

    values: np.ndarray
    dt: float
    rng_seed: int = 0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("stream must be a non-empty 1-d sample sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("stream samples must all be finite")
        if not self.dt > 0:
            raise ValueError(f"sample interval must be positive, got {self.dt}")

    def __len__(self) -> int:
        return int(self.values.size)


def _unchecked_stream(values: np.ndarray, dt: float, rng_seed: int) -> SampleStream:
    # Internal fast path: skips validation for arrays we just computed.
    stream = object.__new__(SampleStream)
    object.__setattr__(stream, "values", values)
    object.__setattr__(stream, "dt", dt)
    object.__setattr__(stream, "rng_seed", rng_seed)
    return stream


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-addressed generator for reproducible, non-overlapping draws.

    (seed, stream) selects a fixed block of the Philox sequence, so parallel
    consumers with distinct stream indices never collide and every draw is
    replayable.
    """
    if stream < 0:
        raise ValueError(f"stream index must be non-negative, got {stream}")
    return np.random.Generator(np.random.Philox(key=seed & _KEY_MASK, counter=stream << 64))


def johnson_variance(resistance: float, scale: NoiseScale = DEFAULT_SCALE) -> float:
    """Mean-square noise voltage of a resistor: a * R."""
    if not resistance > 0:
        raise ValueError(f"resistance must be positive, got {resistance}")
    return scale.a * resistance


def generate_noise(
    resistance: float,
    scale: NoiseScale,
    n: int,
    seed: int,
    *,
    dt: float = 1.0,
    stream: int = 0,
) -> SampleStream:
    """n i.i.d. zero-mean Gaussian samples with variance johnson_variance(R, scale)."""
    if n < 1:
        raise ValueError(f"sample count must be at least 1, got {n}")
    sigma = math.sqrt(johnson_variance(resistance, scale))
    rng = make_rng(seed, stream)
    return SampleStream(values=sigma * rng.standard_normal(n), dt=dt, rng_seed=seed)


def mean_square(stream: SampleStream) -> float:
    """Arithmetic mean of squared samples."""
    values = stream.values
    return float(values @ values) / values.size


def mean_cross(stream_u: SampleStream, stream_i: SampleStream) -> float:
    """Arithmetic mean of elementwise products of two equal-length streams."""
    if len(stream_u) != len(stream_i):
        raise ValueError(
            f"stream lengths differ: {len(stream_u)} vs {len(stream_i)}"
        )
    return float(stream_u.values @ stream_i.values) / len(stream_u)
