"""Multi-tone test signals with calibrated white Gaussian noise.

Components use the sine convention ``A * sin(2*pi*f*t + phase)``. SNR is
always total deterministic power over noise power; the distortion-ratio SNR
used for sieve-threshold modelling lives in :mod:`lindft.linear_estimator`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SignalSpecError

NOISE_ALGORITHM = "numpy.random.PCG64/ziggurat-normal"

SeedLike = int | np.random.SeedSequence | np.random.Generator | None


def wrap_phase(phase):
    """Map an angle (scalar or array) into [-pi, pi)."""
    return (np.asarray(phase) + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class FrequencyComponent:
    freq: float
    amp: float
    phase: float = 0.0

    def __post_init__(self):
        if not self.freq > 0:
            raise SignalSpecError(f"frequency must be positive, got {self.freq}")
        if not self.amp >= 0:
            raise SignalSpecError(f"amplitude must be non-negative, got {self.amp}")
        object.__setattr__(self, "phase", float(wrap_phase(self.phase)))


@dataclass(frozen=True)
class SignalSpec:
    """Everything needed to reproduce one sampled test signal.

    ``snr_db=None`` (or ``inf``) means noise-free.
    """

    fs: float
    n_samples: int
    components: tuple[FrequencyComponent, ...]
    snr_db: float | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise SignalSpecError("component list is empty")
        if self.n_samples < 2:
            raise SignalSpecError(f"n_samples must be >= 2, got {self.n_samples}")
        fmax = max(c.freq for c in self.components)
        if not self.fs > 2 * fmax:
            raise SignalSpecError(
                f"fs={self.fs} Hz aliases the {fmax} Hz component (need fs > {2 * fmax})"
            )
        if self.snr_db is not None and math.isnan(self.snr_db):
            raise SignalSpecError("snr_db is NaN")

    @property
    def delta_f(self) -> float:
        return self.fs / self.n_samples

    @property
    def noise_free(self) -> bool:
        return self.snr_db is None or math.isinf(self.snr_db)

    def with_components(self, components: Iterable[FrequencyComponent]) -> "SignalSpec":
        return SignalSpec(self.fs, self.n_samples, tuple(components), self.snr_db, self.seed)

    @classmethod
    def from_dict(cls, d: dict) -> "SignalSpec":
        comps = tuple(
            FrequencyComponent(float(c["freq"]), float(c["amp"]), float(c.get("phase", 0.0)))
            for c in d["components"]
        )
        snr = d.get("snr_db")
        return cls(
            fs=float(d["fs"]),
            n_samples=int(d["n_samples"]),
            components=comps,
            snr_db=None if snr is None else float(snr),
            seed=int(d.get("seed", 0)),
        )

    def to_dict(self) -> dict:
        return {
            "fs": self.fs,
            "n_samples": self.n_samples,
            "components": [
                {"freq": c.freq, "amp": c.amp, "phase": c.phase} for c in self.components
            ],
            "snr_db": self.snr_db,
            "seed": self.seed,
            "noise_algorithm": NOISE_ALGORITHM,
        }


@dataclass(frozen=True)
class SampledSignal:
    samples: np.ndarray = field(repr=False)
    fs: float

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.fs


def load_spec(path: str | Path) -> SignalSpec:
    with open(path) as fh:
        return SignalSpec.from_dict(json.load(fh))


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def tones(fs: float, n_samples: int, components: Sequence[FrequencyComponent]) -> np.ndarray:
    """Noise-free sum of sines sampled at ``n / fs``."""
    n = np.arange(n_samples)
    out = np.zeros(n_samples)
    for c in components:
        out += c.amp * np.sin(2 * np.pi * c.freq * n / fs + c.phase)
    return out


def add_awgn(samples, snr_db: float | None, seed: SeedLike = None) -> np.ndarray:
    """Add white Gaussian noise at ``snr_db`` relative to the input's mean square.

    Args:
        samples: real input samples.
        snr_db: target SNR; ``None`` or ``+inf`` returns an unchanged copy.
        seed: integer seed, SeedSequence or an existing Generator.

    Raises:
        SignalSpecError: non-finite input, empty input, or zero signal power.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise SignalSpecError("cannot add noise to an empty signal")
    if not np.all(np.isfinite(x)):
        raise SignalSpecError("input samples contain non-finite values")
    if snr_db is None or (math.isinf(snr_db) and snr_db > 0):
        return x.copy()
    p_signal = float(np.mean(x * x))
    if p_signal == 0.0:
        raise SignalSpecError("SNR is undefined for a zero-power signal")
    sigma = math.sqrt(p_signal / 10 ** (snr_db / 10))
    return x + sigma * _rng(seed).standard_normal(x.shape)


def synthesize(spec: SignalSpec) -> SampledSignal:
    x = tones(spec.fs, spec.n_samples, spec.components)
    if not spec.noise_free:
        x = add_awgn(x, spec.snr_db, spec.seed)
    return SampledSignal(x, spec.fs)


def write_samples_csv(signal: SampledSignal, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "time_s", "value"])
        for i, (t, v) in enumerate(zip(signal.times, signal.samples)):
            w.writerow([i, repr(float(t)), repr(float(v))])


def read_samples_csv(path: str | Path, fs: float | None = None) -> SampledSignal:
    """Read a CSV written by :func:`write_samples_csv`.

    ``fs`` is inferred from the ``time_s`` column when not given.
    """
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise SignalSpecError(f"{path}: no samples")
    values = np.array([float(r["value"]) for r in rows])
    if fs is None:
        if len(rows) < 2:
            raise SignalSpecError(f"{path}: cannot infer fs from a single sample")
        t = np.array([float(r["time_s"]) for r in rows])
        fs = 1.0 / float(np.mean(np.diff(t)))
    return SampledSignal(values, float(fs))
