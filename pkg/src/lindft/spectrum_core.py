"""Normalized DFT, the single-pole leakage model and peak clustering."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PoleProximityError
from .signal_model import SampledSignal

POLE_EPS = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """DFT bins scaled by ``1/N``.

    With this scaling an on-bin complex exponential ``A*exp(j(2*pi*f*t+phi))``
    shows up as exactly ``A*exp(j*phi)`` in its bin.
    """

    bins: np.ndarray = field(repr=False)
    fs: float

    @property
    def n(self) -> int:
        return len(self.bins)

    @property
    def delta_f(self) -> float:
        return self.fs / self.n

    @property
    def half(self) -> int:
        """Number of bins in the usable positive half, DC included."""
        return self.n // 2

    def freqs(self) -> np.ndarray:
        return np.arange(self.n) * self.delta_f

    def magnitude(self) -> np.ndarray:
        return np.abs(self.bins)


@dataclass(frozen=True)
class PeakCluster:
    k_peak: int
    q: int
    k_indices: np.ndarray = field(repr=False)

    @property
    def center(self) -> int:
        """Origin of the centred bin coordinates used by the solver."""
        return self.k_peak


def dft(signal: SampledSignal | np.ndarray, fs: float | None = None) -> Spectrum:
    """Rectangular-window DFT normalized by ``1/N``."""
    if isinstance(signal, SampledSignal):
        x, fs = signal.samples, signal.fs
    else:
        x = np.asarray(signal, dtype=float)
        if fs is None:
            raise ValueError("fs is required when passing a bare array")
    if len(x) == 0:
        raise ValueError("cannot transform an empty signal")
    if len(x) < 2:
        raise ValueError("need at least two samples")
    return Spectrum(np.fft.fft(x) / len(x), float(fs))


def eval_linear_model(alpha, beta, k, pole_eps: float = POLE_EPS):
    """Leakage of one component onto bin(s) ``k``: ``alpha / (beta - k)``."""
    d = np.asarray(beta) - np.asarray(k, dtype=float)
    if np.any(np.abs(d) <= pole_eps):
        raise PoleProximityError(
            f"beta={beta} lies on a bin; read the component directly from the spectrum"
        )
    out = np.asarray(alpha / d)
    return out.item() if out.ndim == 0 else out


def cluster_window(k_peak: int, q: int, n_bins: int) -> np.ndarray:
    """The ``2q`` contiguous bins ``k_peak-q+1 .. k_peak+q``.

    The window is slid (not shrunk) to stay inside ``[1, n_bins//2 - 1]``.
    """
    lo, hi = 1, n_bins // 2 - 1
    if hi - lo + 1 < 2 * q:
        raise ValueError(f"spectrum of {n_bins} bins cannot hold a {2 * q}-bin cluster")
    start = k_peak - q + 1
    start = min(max(start, lo), hi - 2 * q + 1)
    return np.arange(start, start + 2 * q)


def find_peaks(spectrum: Spectrum, threshold: float, q: int) -> list[PeakCluster]:
    """Local maxima of ``|bins|`` in the positive half above ``threshold * max``.

    Peaks are visited from largest to smallest. A weaker peak that would sit at
    an interior position of an already accepted cluster is folded into it;
    otherwise it opens its own (possibly overlapping) cluster.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    mag = np.abs(spectrum.bins[: spectrum.half])
    if mag.size < 3:
        return []
    top = mag[1:].max()
    if top == 0.0:
        return []
    inner = mag[1:-1]
    is_max = (inner > mag[:-2]) & (inner >= mag[2:]) & (inner > threshold * top)
    ks = np.nonzero(is_max)[0] + 1
    if ks.size == 0:
        return []

    accepted: list[tuple[int, np.ndarray]] = []
    for k in ks[np.argsort(-mag[ks], kind="stable")]:
        k = int(k)
        # interior of a window = positions 2 .. 2q-1 (1-based)
        if any(w[1] <= k <= w[-2] for _, w in accepted):
            continue
        accepted.append((k, cluster_window(k, q, spectrum.n)))
    accepted.sort(key=lambda kw: kw[0])
    return [PeakCluster(k, q, w) for k, w in accepted]


def write_spectrum_csv(spectrum: Spectrum, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "freq_hz", "re", "im", "magnitude"])
        for k, (f, b) in enumerate(zip(spectrum.freqs(), spectrum.bins)):
            w.writerow([k, repr(float(f)), repr(float(b.real)), repr(float(b.imag)), repr(float(abs(b)))])
