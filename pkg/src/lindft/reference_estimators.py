"""Baseline line estimators: plain peak-picking FFT and Blackman 4-line interpolation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import StencilError
from .linear_estimator import RecoveredComponent
from .signal_model import SampledSignal, wrap_phase

# periodic Blackman: w[n] = a0 - a1 cos(2 pi n / N) + a2 cos(4 pi n / N)
BLACKMAN = (0.42, 0.5, 0.08)


@dataclass(frozen=True)
class BaselineConfig:
    method: Literal["plain_fft", "blackman_ip4"] = "plain_fft"
    peak_threshold: float = 0.01

    def __post_init__(self):
        if not self.peak_threshold > 0:
            raise ValueError("peak_threshold must be positive")
        if self.method not in ("plain_fft", "blackman_ip4"):
            raise ValueError(f"unknown baseline {self.method!r}")


def _local_maxima(mag: np.ndarray, threshold: float) -> np.ndarray:
    if mag.size < 3 or mag[1:].max() == 0:
        return np.array([], dtype=int)
    inner = mag[1:-1]
    hit = (inner > mag[:-2]) & (inner >= mag[2:]) & (inner > threshold * mag[1:].max())
    return np.nonzero(hit)[0] + 1


def fft_estimate(signal: SampledSignal, config: BaselineConfig | None = None) -> list[RecoveredComponent]:
    """Each local maximum of the rectangular spectrum read as one line."""
    cfg = config or BaselineConfig()
    x = signal.samples
    n = len(x)
    bins = np.fft.rfft(x) / n
    mag = np.abs(bins[: n // 2])
    ks = _local_maxima(mag, cfg.peak_threshold)
    df = signal.fs / n
    amps = 2 * mag[ks]
    phases = wrap_phase(np.angle(bins[ks]) + np.pi / 2)
    return [
        RecoveredComponent(float(k * df), float(a), float(p), int(k), float(m))
        for k, a, p, m in zip(ks, amps, phases, mag[ks])
    ]


def _dirichlet(d, n: int):
    """``(1/N) sum_n exp(j 2 pi d n / N)`` for real (fractional) bin offsets ``d``."""
    d = np.asarray(d, dtype=float)
    num = np.expm1(2j * np.pi * d)
    den = n * np.expm1(2j * np.pi * d / n)
    small = np.abs(den) < 1e-300
    return np.where(small, 1.0 + 0j, num / np.where(small, 1.0, den))


def blackman_kernel(d, n: int):
    """Windowed, ``1/N``-normalized response at offset ``d = beta - k``.

    A line ``A exp(j(2 pi beta n / N + phi))`` produces
    ``A exp(j phi) * blackman_kernel(beta - k, N)`` in bin ``k``.
    """
    a0, a1, a2 = BLACKMAN
    d = np.asarray(d, dtype=float)
    return (
        a0 * _dirichlet(d, n)
        - 0.5 * a1 * (_dirichlet(d + 1, n) + _dirichlet(d - 1, n))
        + 0.5 * a2 * (_dirichlet(d + 2, n) + _dirichlet(d - 2, n))
    )


def blackman_window(n: int) -> np.ndarray:
    a0, a1, a2 = BLACKMAN
    t = 2 * np.pi * np.arange(n) / n
    return a0 - a1 * np.cos(t) + a2 * np.cos(2 * t)


def four_line_stencil(mag: np.ndarray, k: int) -> np.ndarray:
    """The peak line, its larger neighbour and one line beyond each side."""
    left = k - 2 if mag[k - 1] >= mag[k + 1] else k - 1
    lines = np.arange(left, left + 4)
    if lines[0] < 1 or lines[-1] > len(mag) - 1:
        raise StencilError(f"4-line stencil at bin {k} leaves the positive half")
    return lines


def interpolate_line(bins: np.ndarray, k: int, n: int) -> tuple[float, complex]:
    """Fractional line position and complex envelope from four lines.

    The offset minimizes the squared misfit between the four magnitudes and
    the scaled analytic main-lobe magnitude; the complex envelope is then the
    least-squares projection of the four bins onto the kernel.
    """
    mag = np.abs(bins)
    lines = four_line_stencil(mag, k)
    y = mag[lines]
    c = bins[lines]

    def misfit(beta):
        g = np.abs(blackman_kernel(beta - lines, n))
        scale = (g @ y) / (g @ g)
        return float(np.sum((y - scale * g) ** 2))

    res = minimize_scalar(misfit, bounds=(lines[1] - 0.5, lines[2] + 0.5), method="bounded",
                          options={"xatol": 1e-10})
    beta = float(res.x)
    g = blackman_kernel(beta - lines, n)
    env = complex(np.vdot(g, c) / np.vdot(g, g))
    return beta, env


def wifft_estimate(signal: SampledSignal, config: BaselineConfig | None = None) -> list[RecoveredComponent]:
    """Blackman-windowed spectrum with four-line interpolation per peak.

    Peaks whose stencil would run into DC or Nyquist are skipped.
    """
    cfg = config or BaselineConfig(method="blackman_ip4")
    x = signal.samples
    n = len(x)
    if n < 8:
        raise ValueError("need at least 8 samples for a 4-line stencil")
    bins = np.fft.rfft(x * blackman_window(n)) / n
    half = bins[: n // 2]
    mag = np.abs(half)
    df = signal.fs / n
    out = []
    for k in _local_maxima(mag, cfg.peak_threshold):
        try:
            beta, env = interpolate_line(half, int(k), n)
        except StencilError:
            continue
        out.append(RecoveredComponent(beta * df, 2 * abs(env), float(wrap_phase(np.angle(env) + np.pi / 2)),
                                      int(k), float(mag[k])))
    return out
