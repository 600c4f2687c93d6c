"""Gabor/STFT analysis and least-squares synthesis.

Coefficient matrices are stored frequency-major, shape ``(n_bins, n_frames)``,
so column ``n`` is frame ``n`` and row ``m`` is frequency bin ``m``.  The
reconstruction loop works on the transposed (frame-major) layout through
:class:`GaborFrame` to avoid copies.

Framing: the signal is zero-padded by ``window_length // 2`` samples on the
left and the remainder of ``window_length`` on the right, then cut into
``1 + len(x) // hop_length`` frames of ``window_length`` samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import cosdg

from .errors import ConfigError, DomainError, NonInvertibleConfigError

WINDOW_KINDS = ("hann",)
PADDING_MODES = ("zero_edge",)

#: Envelope values below this make synthesis a hard error.
ENVELOPE_FLOOR = 1e-12
#: Relative deviation below which the squared-window envelope counts as constant.
CONSTANCY_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n) - 1).bit_length()


@dataclass(frozen=True)
class StftConfig:
    """Parameters of the Gabor transform.

    Lengths are in samples.  ``hop_length`` is the frame shift.
    """

    window_length: int
    hop_length: int
    fft_length: int
    sample_rate: int
    window_kind: str = "hann"
    padding: str = "zero_edge"

    def __post_init__(self):
        for name in ("window_length", "hop_length", "fft_length", "sample_rate"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.window_kind not in WINDOW_KINDS:
            raise ConfigError(f"window_kind must be one of {WINDOW_KINDS}, got {self.window_kind!r}")
        if self.padding not in PADDING_MODES:
            raise ConfigError(f"padding must be one of {PADDING_MODES}, got {self.padding!r}")
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.window_length < 2:
            raise ConfigError(f"window_length must be >= 2, got {self.window_length}")
        if not 0 < self.hop_length <= self.window_length <= self.fft_length:
            raise ConfigError(
                "need 0 < hop_length <= window_length <= fft_length, got "
                f"hop={self.hop_length} window={self.window_length} fft={self.fft_length}"
            )
        if self.fft_length % 2:
            raise ConfigError(f"fft_length must be even, got {self.fft_length}")

    @classmethod
    def default(cls, sample_rate: int = 20000, frame_shift_ms: float = 12.5) -> StftConfig:
        """Hann window four hops long, FFT length the next power of two."""
        hop = int(round(sample_rate * frame_shift_ms / 1000.0))
        if hop < 1:
            raise ConfigError(f"frame shift {frame_shift_ms} ms is below one sample at {sample_rate} Hz")
        window = 4 * hop
        return cls(window, hop, next_pow2(window), sample_rate)

    @property
    def n_bins(self) -> int:
        return self.fft_length // 2 + 1

    @property
    def pad_left(self) -> int:
        return self.window_length // 2

    def n_frames(self, n_samples: int) -> int:
        return 1 + n_samples // self.hop_length

    def default_length(self, n_frames: int) -> int:
        """Signal length assumed when only the frame count is known."""
        return (n_frames - 1) * self.hop_length

    @property
    def hop_ms(self) -> float:
        return 1000.0 * self.hop_length / self.sample_rate

    @property
    def window_ms(self) -> float:
        return 1000.0 * self.window_length / self.sample_rate


@dataclass(frozen=True, eq=False)
class Signal:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64)
        if x.ndim != 1:
            raise DomainError(f"signal must be 1-D, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("signal contains NaN or Inf")
        if self.sample_rate <= 0:
            raise DomainError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", _readonly(x))
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def _check_shape(a: np.ndarray, config: StftConfig, what: str):
    if a.ndim != 2 or a.shape[0] != config.n_bins or a.shape[1] < 1:
        raise DomainError(f"{what} must have shape ({config.n_bins}, n_frames), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{what} contains NaN or Inf")


@dataclass(frozen=True, eq=False)
class ComplexSpectrogram:
    coefficients: np.ndarray
    config: StftConfig

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.complex128)
        _check_shape(c, self.config, "coefficients")
        object.__setattr__(self, "coefficients", _readonly(c))

    @property
    def shape(self) -> tuple[int, int]:
        return self.coefficients.shape


@dataclass(frozen=True, eq=False)
class MagnitudeSpectrogram:
    magnitudes: np.ndarray
    config: StftConfig

    def __post_init__(self):
        s = np.array(self.magnitudes, dtype=np.float64)
        _check_shape(s, self.config, "magnitudes")
        if np.any(s < 0):
            raise DomainError("magnitudes must be non-negative")
        object.__setattr__(self, "magnitudes", _readonly(s))

    @property
    def shape(self) -> tuple[int, int]:
        return self.magnitudes.shape


def make_window(kind: str, length: int) -> np.ndarray:
    """Periodic window, ``w[n] = 0.5 - 0.5 cos(2 pi n / length)`` for Hann."""
    if kind not in WINDOW_KINDS:
        raise ConfigError(f"unknown window kind {kind!r}")
    if length < 2:
        raise ConfigError(f"window length must be >= 2, got {length}")
    # cosine in degrees is exact at quarter turns, so e.g. length 4 gives [0, .5, 1, .5]
    return 0.5 - 0.5 * cosdg(360.0 * np.arange(length) / length)


def overlap_add(frames: np.ndarray, hop: int) -> np.ndarray:
    """Sum ``frames`` (shape ``(n, width)``) at ``hop`` stride.

    The summation order is fixed, so results do not depend on threading.
    """
    n, width = frames.shape
    r = -(-width // hop)
    if width == r * hop:
        blocks = frames.reshape(n, r, hop)
    else:
        blocks = np.zeros((n, r * hop), dtype=frames.dtype)
        blocks[:, :width] = frames
        blocks = blocks.reshape(n, r, hop)
    out = np.zeros((n + r - 1, hop), dtype=frames.dtype)
    for k in range(r):
        out[k : k + n] += blocks[:, k]
    return out.ravel()[: (n - 1) * hop + width]


@dataclass(frozen=True)
class ColaReport:
    """Outcome of :func:`validate_cola`.

    ``ok`` means the squared-window envelope never drops below the
    synthesis floor, so least-squares overlap-add inverts the analysis
    exactly.  ``tight`` additionally requires the envelope to be constant.
    """

    ok: bool
    tight: bool
    window_length: int
    hop_length: int
    envelope_min: float
    envelope_max: float
    deviation: float

    def __str__(self) -> str:
        status = "OK" if self.ok else "VIOLATION"
        return (
            f"{status}: window={self.window_length} hop={self.hop_length} "
            f"envelope=[{self.envelope_min:.6g}, {self.envelope_max:.6g}] deviation={self.deviation:.3g}"
        )


def validate_cola(cfg: StftConfig) -> ColaReport:
    w2 = make_window(cfg.window_kind, cfg.window_length) ** 2
    hop = cfg.hop_length
    period = np.array([w2[p::hop].sum() for p in range(hop)])
    lo, hi = float(period.min()), float(period.max())
    deviation = 1.0 - lo / hi if hi > 0 else 1.0
    return ColaReport(
        ok=lo >= ENVELOPE_FLOOR,
        tight=deviation < CONSTANCY_TOL,
        window_length=cfg.window_length,
        hop_length=hop,
        envelope_min=lo,
        envelope_max=hi,
        deviation=deviation,
    )


def bin_weights(cfg: StftConfig) -> np.ndarray:
    """How often each stored bin occurs in the full Hermitian spectrum.

    DC and Nyquist appear once, every other bin twice (as itself and its
    mirror).  Weighting squared moduli by these counts gives the Frobenius
    norm of the two-sided spectrogram, the norm in which the consistency
    projection is orthogonal.
    """
    w = np.full(cfg.n_bins, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w


def spectral_norm(a: np.ndarray, cfg: StftConfig) -> float:
    """Two-sided Frobenius norm of a frequency-major ``(n_bins, n_frames)`` array."""
    return float(np.sqrt(np.dot(np.square(np.abs(a)).sum(axis=1), bin_weights(cfg))))


class GaborFrame:
    """Array-level analysis/synthesis operators for one configuration.

    Works on frame-major arrays of shape ``(n_frames, n_bins)``; the public
    functions below wrap it with the frequency-major value types.
    """

    def __init__(self, config: StftConfig):
        self.config = config
        self.window = _readonly(make_window(config.window_kind, config.window_length))
        self.bin_weights = _readonly(bin_weights(config))
        self._inv_envelope = lru_cache(maxsize=16)(self._compute_inv_envelope)

    def norm(self, a: np.ndarray) -> float:
        """Two-sided Frobenius norm of a frame-major one-sided array."""
        return float(np.sqrt(np.dot(np.square(np.abs(a)).sum(axis=0), self.bin_weights)))

    def analyze(self, x: np.ndarray) -> np.ndarray:
        cfg = self.config
        w = cfg.window_length
        padded = np.zeros(len(x) + w)
        padded[cfg.pad_left : cfg.pad_left + len(x)] = x
        n = cfg.n_frames(len(x))
        frames = sliding_window_view(padded, w)[:: cfg.hop_length][:n] * self.window
        return np.fft.rfft(frames, n=cfg.fft_length, axis=1)

    def synthesize(self, c: np.ndarray, length: int) -> np.ndarray:
        cfg = self.config
        frames = np.fft.irfft(c, n=cfg.fft_length, axis=1)[:, : cfg.window_length]
        frames *= self.window
        y = overlap_add(frames, cfg.hop_length)
        start = cfg.pad_left
        out = np.zeros(length)
        stop = min(start + length, len(y))
        if stop > start:
            out[: stop - start] = y[start:stop]
        return out * self._inv_envelope(c.shape[0], length)

    def project(self, c: np.ndarray, length: int) -> np.ndarray:
        """Orthogonal projection onto consistent spectrograms, ``G G* c``."""
        return self.analyze(self.synthesize(c, length))

    def _compute_inv_envelope(self, n_frames: int, length: int) -> np.ndarray:
        cfg = self.config
        w2 = np.broadcast_to(self.window**2, (n_frames, cfg.window_length))
        env_full = overlap_add(np.ascontiguousarray(w2), cfg.hop_length)
        env = np.zeros(length)
        start = cfg.pad_left
        stop = min(start + length, len(env_full))
        if stop > start:
            env[: stop - start] = env_full[start:stop]
        if length and env.min() < ENVELOPE_FLOOR:
            bad = int(np.argmin(env))
            raise NonInvertibleConfigError(
                f"squared-window envelope is {env[bad]:.3g} at sample {bad} "
                f"(window={cfg.window_length}, hop={cfg.hop_length}, frames={n_frames}); "
                "overlap-add cannot invert this configuration"
            )
        return _readonly(1.0 / env)


@lru_cache(maxsize=32)
def gabor_frame(config: StftConfig) -> GaborFrame:
    return GaborFrame(config)


def analyze(x: Signal, cfg: StftConfig) -> ComplexSpectrogram:
    if x.sample_rate != cfg.sample_rate:
        raise ConfigError(f"signal sample rate {x.sample_rate} Hz does not match config {cfg.sample_rate} Hz")
    if len(x) == 0:
        raise DomainError("cannot analyze an empty signal")
    c = gabor_frame(cfg).analyze(x.samples)
    return ComplexSpectrogram(c.T, cfg)


def synthesize(c: ComplexSpectrogram, target_len: int | None = None) -> Signal:
    """Least-squares inverse of :func:`analyze`, trimmed to ``target_len`` samples."""
    cfg = c.config
    if target_len is None:
        target_len = cfg.default_length(c.shape[1])
    if target_len < 0:
        raise DomainError(f"target_len must be non-negative, got {target_len}")
    y = gabor_frame(cfg).synthesize(c.coefficients.T, target_len)
    return Signal(y, cfg.sample_rate)


def magnitude(c: ComplexSpectrogram) -> MagnitudeSpectrogram:
    return MagnitudeSpectrogram(np.abs(c.coefficients), c.config)
