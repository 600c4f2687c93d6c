"""Quality and timing measurements for reconstructed waveforms."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Any, Callable

import numpy as np

from .errors import DomainError, UndefinedMetricError
from .stft import MagnitudeSpectrogram, Signal, gabor_frame, spectral_norm

SNR_CAP_DB = 300.0
DEFAULT_OVERLAY_LEN = 2**16


def spectral_convergence(s: MagnitudeSpectrogram, x: Signal) -> float:
    """``||abs(STFT(x)) - s||_F / ||s||_F``; 0 is a perfect magnitude match.

    Norms are over the two-sided spectrum, as for the reconstruction
    residual, so for GLA the final residual equals this value.
    ``x`` is analyzed with ``s.config``.  Only the first ``n_frames`` frames
    are compared, so a signal longer than the spectrogram covers is fine.
    """
    cfg = s.config
    if x.sample_rate != cfg.sample_rate:
        raise DomainError(f"signal sample rate {x.sample_rate} Hz does not match spectrogram {cfg.sample_rate} Hz")
    norm = spectral_norm(s.magnitudes, cfg)
    if norm == 0:
        raise UndefinedMetricError("spectral convergence is undefined for an all-zero target")
    n = s.shape[1]
    est = np.abs(gabor_frame(cfg).analyze(x.samples)).T
    if est.shape[1] < n:
        raise DomainError(f"signal yields {est.shape[1]} frames, spectrogram has {n}")
    return spectral_norm(est[:, :n] - s.magnitudes, cfg) / norm


def snr_db(reference: Signal, estimate: Signal) -> float:
    """Signal-to-error ratio in dB, capped at ``SNR_CAP_DB`` for an exact match."""
    if len(reference) != len(estimate):
        raise DomainError(f"length mismatch: {len(reference)} vs {len(estimate)}")
    if reference.sample_rate != estimate.sample_rate:
        raise DomainError(f"sample rate mismatch: {reference.sample_rate} vs {estimate.sample_rate}")
    ref = reference.samples
    signal_energy = float(np.dot(ref, ref))
    if signal_energy == 0:
        raise UndefinedMetricError("SNR is undefined for a silent reference")
    err = ref - estimate.samples
    noise_energy = float(np.dot(err, err))
    if noise_energy == 0:
        return SNR_CAP_DB
    return min(SNR_CAP_DB, 10.0 * math.log10(signal_energy / noise_energy))


def fft_overlay(x: Signal, length: int = DEFAULT_OVERLAY_LEN) -> np.ndarray:
    """Magnitudes of the length-``length`` real DFT of ``x`` (zero-padded or truncated)."""
    if length < 2 or length & (length - 1):
        raise DomainError(f"overlay length must be a power of two >= 2, got {length}")
    return np.abs(np.fft.rfft(x.samples, n=length))


def overlay_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"overlay shapes differ: {a.shape} vs {b.shape}")
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(a - b) / scale)


@dataclass(frozen=True)
class TimingStats:
    runs: int
    mean_ms: float
    min_ms: float
    max_ms: float
    stddev_ms: float

    @classmethod
    def from_samples(cls, samples_ms) -> TimingStats:
        t = np.asarray(samples_ms, dtype=float)
        if t.size < 1:
            raise DomainError("need at least one timing sample")
        # clamp: the float mean of identical values can fall outside [min, max] by one ulp
        mean = min(max(float(t.mean()), float(t.min())), float(t.max()))
        return cls(int(t.size), mean, float(t.min()), float(t.max()), float(t.std()))

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def time_synthesis(task: Callable[[], Any], repeats: int = 10) -> TimingStats:
    """Wall-clock ``task`` ``repeats`` times after one untimed warm-up call."""
    if repeats < 1:
        raise DomainError(f"repeats must be >= 1, got {repeats}")
    task()
    samples = []
    for _ in range(repeats):
        tick = time.perf_counter()
        task()
        samples.append((time.perf_counter() - tick) * 1000.0)
    return TimingStats.from_samples(samples)


@dataclass(frozen=True, eq=False)
class ConvergenceTrace:
    algo: str
    iterations: int
    alpha: float
    residuals: np.ndarray
    fft_overlay: np.ndarray

    @property
    def token(self) -> str:
        return f"{self.algo}:{self.iterations}"
