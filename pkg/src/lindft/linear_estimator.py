"""Per-cluster rational fit of the DFT spectrum and component recovery.

Near a spectral peak the normalized DFT of ``q`` components is modelled as

    S(k) = sum_x alpha_x / (beta_x - k)

Clearing denominators gives ``2q`` equations that are linear in the
polynomial coefficients ``eta`` (the numerator coefficients ``d`` followed by
the denominator coefficients ``c``). The poles ``beta`` are the eigenvalues of
the companion matrix built from ``c``; the residues ``alpha`` follow from a
generalized Vandermonde system in the elementary symmetric functions of the
poles. Candidates are then sieved by amplitude and by the unimodal leakage
shape a genuine rectangular-window line must have.

All bin arithmetic is done in coordinates centred on the cluster's peak bin so
that ``(-k)**m`` stays small for ``q`` up to 8; poles are shifted back
afterwards.
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import DenseInterharmonicError, IllConditionedSystemError, PoleProximityError
from .signal_model import SampledSignal, wrap_phase
from .spectrum_core import POLE_EPS, PeakCluster, Spectrum, cluster_window, dft, find_peaks

log = logging.getLogger(__name__)

COND_CAP = 1e12
IMAG_TOL = 0.05
SEPARATION_FLOOR = 0.05
DEFAULT_MU = 0.01
MU_FLOOR = 1e-15


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning knobs of :func:`estimate_components`.

    ``a_ref=None`` uses the largest recovered amplitude in the window and
    ``dedup_tol_hz=None`` uses a quarter of the bin spacing.
    """

    q: int = 5
    mu: float = DEFAULT_MU
    a_ref: float | None = None
    dedup_tol_hz: float | None = None
    pole_eps: float = POLE_EPS
    peak_threshold: float = 0.01
    cond_cap: float = COND_CAP
    imag_tol: float = IMAG_TOL
    separation_floor: float = SEPARATION_FLOOR

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.a_ref is not None and not self.a_ref > 0:
            raise ValueError("a_ref must be positive")
        if self.dedup_tol_hz is not None and not self.dedup_tol_hz > 0:
            raise ValueError("dedup_tol_hz must be positive")
        if not self.peak_threshold > 0:
            raise ValueError("peak_threshold must be positive")


@dataclass(frozen=True)
class EtaVector:
    """Solution of the cluster system: ``eta[:q]`` = d, ``eta[q:]`` = c.

    ``center`` is the bin the coordinates were shifted by.
    """

    eta: np.ndarray
    q: int
    center: int = 0
    condition: float = float("nan")

    def __post_init__(self):
        if len(self.eta) != 2 * self.q:
            raise ValueError(f"eta must have length 2q={2 * self.q}, got {len(self.eta)}")

    @property
    def d(self) -> np.ndarray:
        return self.eta[: self.q]

    @property
    def c(self) -> np.ndarray:
        return self.eta[self.q :]


@dataclass
class CandidateComponent:
    beta: complex
    alpha: complex
    bin_values: np.ndarray = field(repr=False)
    cluster: PeakCluster = field(repr=False)
    accepted: bool = False
    reason: str = ""

    @property
    def peak_level(self) -> float:
        return float(np.max(np.abs(self.bin_values)))


@dataclass(frozen=True)
class RecoveredComponent:
    freq: float
    amp: float
    phase: float
    cluster_peak_bin: int | None = None
    peak_level: float = float("nan")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.freq, self.amp, self.phase)


@dataclass(frozen=True)
class ClusterDiagnostic:
    k_peak: int
    reason: str
    condition: float = float("nan")


@dataclass
class EstimationResult:
    components: list[RecoveredComponent]
    candidates: list[CandidateComponent]
    diagnostics: list[ClusterDiagnostic]
    spectrum: Spectrum = field(repr=False)
    a_ref: float = float("nan")


# --------------------------------------------------------------------------
# building blocks


def elementary_symmetric(values) -> np.ndarray:
    """``[e_0, e_1, ..., e_n]`` of ``values`` (``e_0 = 1``)."""
    values = np.asarray(values)
    e = np.zeros(len(values) + 1, dtype=np.result_type(values, float))
    e[0] = 1.0
    for v in values:
        e[1:] = e[1:] + v * e[:-1]
    return e


def assemble_system(spectrum: Spectrum, cluster: PeakCluster, q: int | None = None):
    """Matrix and right-hand side of the ``2q`` linearized equations.

    Row ``r`` reads, with ``u = -(k_r - center)``::

        -u**q S(k_r) = -sum_m eta_m u**(m-1) + S(k_r) sum_m eta_{q+m} u**(m-1)

    Raises:
        IllConditionedSystemError: when the spectrum is identically zero over
            the cluster (the system is then exactly rank deficient).
    """
    q = cluster.q if q is None else q
    k = cluster.k_indices
    if len(k) != 2 * q:
        raise ValueError(f"cluster holds {len(k)} bins, need 2q={2 * q}")
    s = spectrum.bins[k]
    if not np.all(np.isfinite(s)):
        raise ValueError("spectrum bins are not finite")
    if not np.any(s):
        raise IllConditionedSystemError("all-zero spectrum over the cluster", math.inf)
    u = -(k - cluster.center).astype(float)
    vander = u[:, None] ** np.arange(q)[None, :]
    a = np.empty((2 * q, 2 * q), dtype=complex)
    a[:, :q] = -vander
    a[:, q:] = s[:, None] * vander
    b = -(u**q) * s
    return a, b


def solve_eta(system, q: int | None = None, center: int = 0, cond_cap: float = COND_CAP) -> EtaVector:
    """Solve the cluster system after unit-norm column equilibration.

    The 1-norm condition number of the equilibrated matrix is compared with
    ``cond_cap``; exceeding it raises instead of returning garbage.
    """
    a, b = system
    q = a.shape[0] // 2 if q is None else q
    scale = np.linalg.norm(a, axis=0)
    if np.any(scale == 0):
        raise IllConditionedSystemError("system has an all-zero column", math.inf)
    a_s = a / scale
    # 1-norm condition number from the explicit inverse (cheap at this size)
    try:
        inv = np.linalg.inv(a_s)
    except np.linalg.LinAlgError:
        raise IllConditionedSystemError("cluster system is singular", math.inf) from None
    cond = float(np.abs(a_s).sum(axis=0).max() * np.abs(inv).sum(axis=0).max())
    if not cond < cond_cap:
        raise IllConditionedSystemError("cluster system is singular or ill-conditioned", cond)
    return EtaVector((inv @ b) / scale, q, center, cond)


def companion_matrix(eta, q: int) -> np.ndarray:
    eta = np.asarray(eta.eta if isinstance(eta, EtaVector) else eta)
    c = eta[q : 2 * q]
    phi = np.zeros((q, q), dtype=complex)
    phi[:-1, 1:] = np.eye(q - 1)
    signs = (-1.0) ** (q - np.arange(q))
    phi[-1] = -signs * c
    return phi


def roots_from_eta(eta, q: int) -> np.ndarray:
    """Poles ``beta`` as eigenvalues of the companion matrix of ``c``.

    The poles are in the same (possibly centred) coordinates as ``eta``.
    """
    eta = np.asarray(eta.eta if isinstance(eta, EtaVector) else eta)
    if not np.all(np.isfinite(eta[q : 2 * q])):
        raise ValueError("denominator coefficients are not finite")
    if q == 1:
        return np.array([complex(eta[1])])
    try:
        return np.linalg.eigvals(companion_matrix(eta, q))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise IllConditionedSystemError(f"eigen-solver failed: {exc}", math.inf) from exc


def vandermonde_matrix(betas) -> np.ndarray:
    """Generalized Vandermonde matrix: ``L[m, p] = e_{q-1-m}({beta_y : y != p})``.

    Leading axes of ``betas`` are treated as a batch.
    """
    betas = np.asarray(betas, dtype=complex)
    q = betas.shape[-1]
    # others[..., p, y] = beta_y, with the diagonal y == p removed (zeroed)
    others = betas[..., None, :] * (1.0 - np.eye(q))
    e = np.zeros(betas.shape[:-1] + (q, q + 1), dtype=complex)
    e[..., 0] = 1.0
    for y in range(q):
        e[..., 1:] = e[..., 1:] + others[..., y : y + 1] * e[..., :-1]
    return np.swapaxes(e[..., q - 1 :: -1], -1, -2)


def min_separation(betas) -> float:
    betas = np.asarray(betas)
    n = len(betas)
    if n < 2:
        return math.inf
    d = np.abs(betas[:, None] - betas[None, :]) + np.diag(np.full(n, np.inf))
    return float(d.min())


def alphas_from_eta(eta, betas, q: int | None = None, separation_floor: float = SEPARATION_FLOOR) -> np.ndarray:
    """Residues from ``d = L(beta) @ alpha`` via the Moore-Penrose pseudoinverse.

    Raises:
        DenseInterharmonicError: two poles closer than ``separation_floor``.
    """
    eta = np.asarray(eta.eta if isinstance(eta, EtaVector) else eta)
    betas = np.asarray(betas, dtype=complex)
    q = len(betas) if q is None else q
    sep = min_separation(betas) if separation_floor else math.inf
    if sep < separation_floor:
        raise DenseInterharmonicError("poles too close to separate", sep)
    return np.linalg.pinv(vandermonde_matrix(betas)) @ eta[:q]


def reconstruct_bins(alpha, beta, cluster: PeakCluster | np.ndarray, pole_eps: float = POLE_EPS) -> np.ndarray:
    k = cluster.k_indices if isinstance(cluster, PeakCluster) else np.asarray(cluster)
    d = beta - k
    if np.any(np.abs(d) <= pole_eps):
        raise PoleProximityError(f"beta={beta} is on bin {k[np.argmin(np.abs(d))]}")
    return alpha / d


def unimodal_rows(levels) -> np.ndarray:
    """Row-wise :func:`is_unimodal_interior` of a 2-D array of levels."""
    levels = np.atleast_2d(np.asarray(levels))
    n = levels.shape[1]
    r = np.argmax(levels, axis=1)
    step = np.diff(levels, axis=1)
    before = np.arange(n - 1)[None, :] < r[:, None]
    ok = np.where(before, step >= 0, step <= 0).all(axis=1)
    return ok & (r > 0) & (r < n - 1)


def is_unimodal_interior(levels) -> bool:
    """Peak strictly inside the sequence, non-decreasing before, non-increasing after."""
    return bool(unimodal_rows(np.asarray(levels, dtype=float)[None, :])[0])


def passes_sieve(bin_values, mu: float, a_ref: float) -> bool:
    levels = np.abs(bin_values)
    return bool(levels.max() > mu * a_ref) and is_unimodal_interior(levels)


def sieve(candidates: Sequence[CandidateComponent], mu: float, a_ref: float) -> list[CandidateComponent]:
    """Keep candidates that clear the amplitude threshold and the shape test."""
    if not a_ref > 0:
        raise ValueError("a_ref must be positive")
    return [c for c in candidates if passes_sieve(c.bin_values, mu, a_ref)]


def envelope(alpha, beta) -> complex:
    """Complex amplitude ``A*exp(j*phi)`` of the positive-frequency line."""
    return 2j * np.pi * alpha / (np.exp(2j * np.pi * beta) - 1.0)


def recover_params(alpha, beta, delta_f: float, peak_bin: complex | None = None,
                   pole_eps: float = POLE_EPS) -> RecoveredComponent:
    """Frequency, sine amplitude and sine phase of one pole/residue pair.

    An exactly on-bin pole makes the envelope formula 0/0; the component is
    then read from ``peak_bin`` (the DFT value at that bin).
    """
    b = float(np.real(beta))
    if not b > 0:
        raise ValueError(f"pole at {b} bins is outside the positive half")
    m = round(b)
    if abs(b - m) <= pole_eps:
        if peak_bin is None:
            raise PoleProximityError(f"on-bin pole at {m}; pass the bin value to read it directly")
        env = complex(peak_bin)
        b = float(m)
    else:
        env = complex(envelope(alpha, b))
    return RecoveredComponent(
        freq=b * delta_f,
        amp=2.0 * abs(env),
        phase=float(wrap_phase(np.angle(env) + np.pi / 2)),
    )


# --------------------------------------------------------------------------
# sieve threshold model

MuModel = Literal["constant", "exponential", "polynomial"]


def model_amplitudes(snr_db: float, model: MuModel, n_components: int, *,
                     c: float = 0.1, r: float = 0.5, p: float = 1.0) -> np.ndarray:
    """Non-fundamental amplitudes (unit fundamental) meeting the distortion budget.

    Here SNR is fundamental power over total non-fundamental power, so
    ``sum(A_k**2) = 10**(-snr_db/10)``; the model only fixes the shape.
    """
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    if n_components < 1:
        raise ValueError("need at least one non-fundamental component")
    k = np.arange(2, n_components + 2, dtype=float)
    if model == "constant":
        if not 0 < c <= 1:
            raise ValueError("constant model needs 0 < c <= 1")
        shape = np.full(n_components, c)
    elif model == "exponential":
        if not 0 < r < 1:
            raise ValueError("exponential model needs 0 < r < 1")
        shape = r ** (k - 1)
    elif model == "polynomial":
        if not p > 0:
            raise ValueError("polynomial model needs p > 0")
        shape = k**-p
    else:
        raise ValueError(f"unknown amplitude model {model!r}")
    budget = 10 ** (-snr_db / 10)
    return shape * math.sqrt(budget / float(np.sum(shape**2)))


def compute_mu(snr_db: float, model: MuModel = "constant", n_components: int = 1, *,
               c_factor: float = 0.1, **model_params) -> float:
    """Sieve threshold ``mu = c_factor * min(A_k)`` under an amplitude model."""
    amps = model_amplitudes(snr_db, model, n_components, **model_params)
    mu = c_factor * float(amps.min())
    if not mu > MU_FLOOR:
        warnings.warn(f"mu={mu:.3g} underflows; floored at {MU_FLOOR}", RuntimeWarning, stacklevel=2)
        mu = MU_FLOOR
    return mu


# --------------------------------------------------------------------------
# pipeline


def _fit_cluster(spectrum: Spectrum, cluster: PeakCluster, cfg: EstimatorConfig) -> list[CandidateComponent]:
    """Reference single-cluster fit built from the public building blocks."""
    q = cluster.q
    k = cluster.k_indices
    eta = solve_eta(assemble_system(spectrum, cluster, q), q, cluster.center, cfg.cond_cap)
    betas = roots_from_eta(eta, q) + cluster.center
    # only poles that could be genuine lines must be separable
    in_window = (np.abs(betas.imag) < cfg.imag_tol) & (betas.real > k[0]) & (betas.real < k[-1])
    sep = min_separation(betas[in_window])
    if sep < cfg.separation_floor:
        raise DenseInterharmonicError("poles too close to separate", sep)
    alphas = alphas_from_eta(eta, betas - cluster.center, q, separation_floor=0.0)
    return _make_candidates(spectrum, cluster, alphas, betas, cfg.pole_eps)


def _make_candidates(spectrum, cluster, alphas, betas, pole_eps) -> list[CandidateComponent]:
    k = cluster.k_indices
    d = betas[:, None] - k[None, :]
    on_bin = np.abs(d) <= pole_eps
    vals = alphas[:, None] / np.where(on_bin, 1.0, d)
    for row in np.nonzero(on_bin.any(axis=1))[0]:
        vals[row] = np.where(on_bin[row], spectrum.bins[k], 0.0)
    return [CandidateComponent(complex(b), complex(a), v, cluster) for a, b, v in zip(alphas, betas, vals)]


def _fit_batch(spectrum: Spectrum, clusters: Sequence[PeakCluster], cfg: EstimatorConfig) -> list:
    """Same computation as :func:`_fit_cluster` for equal-order clusters, stacked.

    Returns, per cluster, either its candidate list or the exception the
    single-cluster fit would have raised.
    """
    q = clusters[0].q
    kk = np.stack([c.k_indices for c in clusters])
    centers = np.array([c.center for c in clusters])
    s = spectrum.bins[kk]
    u = -(kk - centers[:, None]).astype(float)
    vander = u[:, :, None] ** np.arange(q)
    a = np.concatenate([-vander + 0j, s[:, :, None] * vander], axis=2)
    b = -(u**q) * s
    scale = np.linalg.norm(a, axis=1)
    results: list = [None] * len(clusters)
    bad = ~np.all(scale > 0, axis=1) | ~np.all(np.isfinite(s), axis=1)
    if bad.any():
        # rare: let the reference path produce the exact error per cluster
        for i in np.nonzero(bad)[0]:
            try:
                results[i] = _fit_cluster(spectrum, clusters[i], cfg)
            except (IllConditionedSystemError, DenseInterharmonicError, ValueError) as exc:
                results[i] = exc
        scale = np.where(scale > 0, scale, 1.0)
    a_s = a / scale[:, None, :]
    try:
        inv = np.linalg.inv(a_s)
    except np.linalg.LinAlgError:
        for i, c in enumerate(clusters):
            if results[i] is None:
                try:
                    results[i] = _fit_cluster(spectrum, c, cfg)
                except (IllConditionedSystemError, DenseInterharmonicError) as exc:
                    results[i] = exc
        return results
    cond = np.abs(a_s).sum(axis=1).max(axis=1) * np.abs(inv).sum(axis=1).max(axis=1)
    eta = np.einsum("cij,cj->ci", inv, b) / scale
    c_coef = eta[:, q:]
    if q == 1:
        roots = c_coef.copy()
    else:
        phi = np.zeros((len(clusters), q, q), dtype=complex)
        phi[:, :-1, 1:] = np.eye(q - 1)
        phi[:, -1] = -((-1.0) ** (q - np.arange(q))) * c_coef
        good = np.all(np.isfinite(c_coef), axis=1)
        roots = np.full((len(clusters), q), np.nan + 0j)
        if good.any():
            roots[good] = np.linalg.eigvals(phi[good])
    betas = roots + centers[:, None]
    in_window = ((np.abs(betas.imag) < cfg.imag_tol)
                 & (betas.real > kk[:, :1]) & (betas.real < kk[:, -1:]))
    gap = np.abs(betas[:, :, None] - betas[:, None, :])
    pair_ok = in_window[:, :, None] & in_window[:, None, :] & ~np.eye(q, dtype=bool)
    sep = np.where(pair_ok, gap, np.inf).reshape(len(clusters), -1).min(axis=1)
    finite_roots = np.all(np.isfinite(roots), axis=1)
    alphas = np.full_like(roots, np.nan)
    if finite_roots.any():
        lam = vandermonde_matrix(roots[finite_roots])
        alphas[finite_roots] = np.einsum("cij,cj->ci", np.linalg.pinv(lam), eta[finite_roots, :q])
    for i, cl in enumerate(clusters):
        if results[i] is not None:
            continue
        if not cond[i] < cfg.cond_cap:
            results[i] = IllConditionedSystemError(
                "cluster system is singular or ill-conditioned", float(cond[i]))
        elif not finite_roots[i]:
            results[i] = IllConditionedSystemError("denominator coefficients are not finite", math.inf)
        elif sep[i] < cfg.separation_floor:
            results[i] = DenseInterharmonicError("poles too close to separate", float(sep[i]))
        else:
            results[i] = _make_candidates(spectrum, cl, alphas[i], betas[i], cfg.pole_eps)
    return results


def _fit_with_order_reduction(spectrum: Spectrum, cluster: PeakCluster, cfg: EstimatorConfig,
                              diagnostics: list[ClusterDiagnostic],
                              first: list | Exception | None = None) -> list[CandidateComponent]:
    """Fit at order q; on an ill-conditioned system retry at q-1, q-2, ... 1.

    Noise-free spectra make the high-order system nearly degenerate (spare
    poles cancel against numerator roots); a lower order is then exact.
    ``first`` is an already computed order-q outcome.
    """
    q = cluster.q
    res = first if first is not None else _fit_batch(spectrum, [cluster], cfg)[0]
    while True:
        if not isinstance(res, Exception):
            return res
        if not isinstance(res, IllConditionedSystemError) or q == 1:
            raise res
        q -= 1
        diagnostics.append(ClusterDiagnostic(
            cluster.k_peak, f"{res}; order reduced to q={q}", res.condition))
        cluster = PeakCluster(cluster.k_peak, q, cluster_window(cluster.k_peak, q, spectrum.n))
        res = _fit_batch(spectrum, [cluster], cfg)[0]


def _on_bin_candidate(spectrum: Spectrum, cluster: PeakCluster) -> CandidateComponent | None:
    """Direct readout when the cluster energy sits in a single bin."""
    s = spectrum.bins[cluster.k_indices]
    energy = np.abs(s) ** 2
    r = int(np.argmax(energy))
    if energy.sum() == 0 or energy[r] < (1 - 1e-9) * energy.sum():
        return None
    vals = np.zeros_like(s)
    vals[r] = s[r]
    return CandidateComponent(complex(cluster.k_indices[r]), 0j, vals, cluster)


def _shape_flags(candidates: Sequence[CandidateComponent]) -> list[bool]:
    """Unimodality of every candidate, evaluated per window length in one go."""
    flags = [False] * len(candidates)
    by_len: dict[int, list[int]] = {}
    for i, c in enumerate(candidates):
        by_len.setdefault(len(c.bin_values), []).append(i)
    for idx in by_len.values():
        rows = unimodal_rows(np.abs(np.stack([candidates[i].bin_values for i in idx])))
        for i, ok in zip(idx, rows):
            flags[i] = bool(ok)
    return flags


def estimate(signal: SampledSignal | Spectrum, config: EstimatorConfig | None = None) -> EstimationResult:
    """Full pipeline with candidates and per-cluster diagnostics.

    Cluster-level failures never abort the window; they are recorded in
    ``diagnostics`` and the cluster contributes no components.
    """
    cfg = config or EstimatorConfig()
    spectrum = signal if isinstance(signal, Spectrum) else dft(signal)
    df = spectrum.delta_f
    diagnostics: list[ClusterDiagnostic] = []
    candidates: list[CandidateComponent] = []

    clusters = find_peaks(spectrum, cfg.peak_threshold, cfg.q)
    first = _fit_batch(spectrum, clusters, cfg) if clusters else []
    for cluster, res in zip(clusters, first):
        try:
            candidates.extend(_fit_with_order_reduction(spectrum, cluster, cfg, diagnostics, res))
        except IllConditionedSystemError as exc:
            direct = _on_bin_candidate(spectrum, cluster)
            if direct is not None:
                candidates.append(direct)
            else:
                diagnostics.append(ClusterDiagnostic(cluster.k_peak, str(exc), exc.condition))
        except DenseInterharmonicError as exc:
            diagnostics.append(ClusterDiagnostic(cluster.k_peak, str(exc)))

    unimodal = _shape_flags(candidates)
    shaped = []
    for c, ok in zip(candidates, unimodal):
        if abs(c.beta.imag) >= cfg.imag_tol:
            c.reason = "complex pole"
        elif not ok or not c.beta.real > 0:
            c.reason = "leakage shape"
        else:
            shaped.append(c)

    recovered: dict[int, RecoveredComponent] = {}
    for c in shaped:
        peak = spectrum.bins[int(round(c.beta.real))]
        rc = recover_params(c.alpha, c.beta, df, peak, cfg.pole_eps)
        recovered[id(c)] = RecoveredComponent(rc.freq, rc.amp, rc.phase, c.cluster.k_peak, c.peak_level)

    a_ref = cfg.a_ref
    if a_ref is None:
        a_ref = max((rc.amp for rc in recovered.values()), default=0.0)
    components: list[RecoveredComponent] = []
    if a_ref > 0:
        for c in shaped:
            # shape already verified above; only the level test remains
            if c.peak_level > cfg.mu * a_ref:
                c.accepted = True
                components.append(recovered[id(c)])
            else:
                c.reason = "below threshold"
    components = deduplicate(components, cfg.dedup_tol_hz if cfg.dedup_tol_hz else df / 4)
    kept = {id(rc) for rc in components}
    for c in shaped:
        if c.accepted and id(recovered[id(c)]) not in kept:
            c.accepted = False
            c.reason = "duplicate"
    return EstimationResult(components, candidates, diagnostics, spectrum, a_ref)


def estimate_components(signal: SampledSignal | Spectrum, config: EstimatorConfig | None = None) -> list[RecoveredComponent]:
    """Recovered ``(f, A, phi)`` set of one analysis window, sorted by frequency."""
    return estimate(signal, config).components


def deduplicate(components: Iterable[RecoveredComponent], tol_hz: float) -> list[RecoveredComponent]:
    """Drop components within ``tol_hz`` of a stronger one (by peak level).

    Only components from different clusters are compared: poles of one
    cluster are distinct roots, so two of them are never the same line.
    """
    kept: list[RecoveredComponent] = []
    for rc in sorted(components, key=lambda c: -c.peak_level if math.isfinite(c.peak_level) else -c.amp):
        if all(abs(rc.freq - k.freq) > tol_hz
               or (rc.cluster_peak_bin is not None and rc.cluster_peak_bin == k.cluster_peak_bin)
               for k in kept):
            kept.append(rc)
    return sorted(kept, key=lambda c: c.freq)


def write_components_csv(result: EstimationResult | Sequence[RecoveredComponent], path: str | Path) -> None:
    """Component table; with a full result every shaped candidate is listed."""
    rows = []
    if isinstance(result, EstimationResult):
        df = result.spectrum.delta_f
        for c in result.candidates:
            try:
                peak = result.spectrum.bins[int(round(c.beta.real))] if c.beta.real > 0 else None
                rc = recover_params(c.alpha, c.beta, df, peak)
            except (ValueError, IndexError):
                continue
            rows.append((rc.freq, rc.amp, rc.phase, c.cluster.k_peak, int(c.accepted)))
    else:
        rows = [(c.freq, c.amp, c.phase, c.cluster_peak_bin, 1) for c in result]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["freq_hz", "amp_pu", "phase_rad", "cluster_peak_bin", "accepted_flag"])
        for f, a, ph, kp, acc in sorted(rows):
            w.writerow([repr(float(f)), repr(float(a)), repr(float(ph)), "" if kp is None else kp, acc])
