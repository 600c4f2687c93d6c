"""Griffin-Lim phase reconstruction, plain and with momentum.

Both loops alternate the magnitude projection (replace moduli with the
target magnitudes, keep phases) and the consistency projection (synthesize,
then analyze again).  The fast variant extrapolates each consistent iterate
along the direction of the previous step::

    t_i = P_consistent(P_magnitude(c_{i-1}))
    c_i = t_i + alpha * (t_i - t_{i-1})

With ``alpha = 0`` it performs exactly the same arithmetic as :func:`gla`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InvalidParamError, NonInvertibleConfigError, ObserverError
from .stft import ComplexSpectrogram, MagnitudeSpectrogram, Signal, gabor_frame, validate_cola

ALGORITHMS = ("gla", "fgla")
INIT_KINDS = ("zero_phase", "random_phase")

Observer = Callable[[int, float, float], None]


@dataclass(frozen=True)
class InitStrategy:
    kind: str = "zero_phase"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise InvalidParamError(f"init kind must be one of {INIT_KINDS}, got {self.kind!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParamError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class ReconstructionParams:
    """Iteration count, momentum and initial phase.

    ``tolerance`` enables an early stop once the residual drops below it;
    it is off by default so runs always perform ``iterations`` steps.
    """

    iterations: int = 30
    alpha: float = 0.2
    init: InitStrategy = InitStrategy()
    tolerance: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.iterations, bool) or int(self.iterations) != self.iterations or self.iterations < 1:
            raise InvalidParamError(f"iterations must be a positive integer, got {self.iterations!r}")
        if not (0.0 <= self.alpha < 1.0):
            raise InvalidParamError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise InvalidParamError(f"tolerance must be positive, got {self.tolerance}")


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    waveform: Signal
    residual_trace: np.ndarray
    iter_times: np.ndarray
    total_time: float
    params: ReconstructionParams
    algo: str = "fgla"

    @property
    def final_residual(self) -> float:
        return float(self.residual_trace[-1])


def _check_pair(c: ComplexSpectrogram, s: MagnitudeSpectrogram):
    if c.shape != s.shape or c.config != s.config:
        raise DomainError(f"coefficient shape {c.shape} does not match magnitude shape {s.shape}")


def _unit_phase(c: np.ndarray, mag: np.ndarray) -> np.ndarray:
    # zero coefficients get phase 0
    out = np.ones_like(c)
    np.divide(c, mag, out=out, where=mag > 0)
    return out


def project_magnitude(c: ComplexSpectrogram, s: MagnitudeSpectrogram) -> ComplexSpectrogram:
    """Replace every modulus of ``c`` by the matching entry of ``s``."""
    _check_pair(c, s)
    cc = c.coefficients
    return ComplexSpectrogram(s.magnitudes * _unit_phase(cc, np.abs(cc)), c.config)


def project_consistent(c: ComplexSpectrogram, target_len: int | None = None) -> ComplexSpectrogram:
    """Project onto the range of the analysis operator (synthesize, then analyze)."""
    cfg = c.config
    report = validate_cola(cfg)
    if not report.ok:
        raise NonInvertibleConfigError(str(report))
    if target_len is None:
        target_len = cfg.default_length(c.shape[1])
    t = gabor_frame(cfg).project(c.coefficients.T, target_len)
    return ComplexSpectrogram(t.T, cfg)


def init_coefficients(s: MagnitudeSpectrogram, strategy: InitStrategy = InitStrategy()) -> ComplexSpectrogram:
    if strategy.kind == "zero_phase":
        return ComplexSpectrogram(s.magnitudes.astype(np.complex128), s.config)
    rng = np.random.default_rng(int(strategy.seed))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=s.shape)
    return ComplexSpectrogram(s.magnitudes * np.exp(1j * theta), s.config)


def _run(
    s: MagnitudeSpectrogram,
    params: ReconstructionParams,
    observer: Observer | None,
    target_len: int | None,
    alpha: float | None,
    algo: str,
) -> ReconstructionResult:
    start = time.perf_counter()
    cfg = s.config
    report = validate_cola(cfg)
    if not report.ok:
        raise NonInvertibleConfigError(str(report))
    if target_len is None:
        target_len = cfg.default_length(s.shape[1])
    frame = gabor_frame(cfg)

    # frame-major views; no copies of the inputs
    mags = s.magnitudes.T
    norm = frame.norm(mags)
    c = init_coefficients(s, params.init).coefficients.T
    c_abs = np.abs(c)
    t_prev = None

    residuals = []
    iter_times = []
    for i in range(1, params.iterations + 1):
        tick = time.perf_counter()
        t = frame.project(mags * _unit_phase(c, c_abs), target_len)
        t_abs = np.abs(t)
        if alpha is None:
            c, c_abs = t, t_abs
        else:
            # the first step has no previous iterate; t_0 = P(c_0) = t_1 contributes no momentum
            c = t if t_prev is None else t + alpha * (t - t_prev)
            c_abs = t_abs if t_prev is None else np.abs(c)
            t_prev = t
        residual = frame.norm(t_abs - mags) / norm if norm > 0 else 0.0
        iter_times.append((time.perf_counter() - tick) * 1000.0)
        residuals.append(residual)
        if observer is not None:
            try:
                observer(i, residual, (time.perf_counter() - start) * 1000.0)
            except Exception as exc:
                raise ObserverError(f"observer failed at iteration {i}: {exc!r}") from exc
        if params.tolerance is not None and residual < params.tolerance:
            break

    x = frame.synthesize(c, target_len)
    total = (time.perf_counter() - start) * 1000.0
    return ReconstructionResult(
        waveform=Signal(x, cfg.sample_rate),
        residual_trace=np.asarray(residuals),
        iter_times=np.asarray(iter_times),
        total_time=total,
        params=params,
        algo=algo,
    )


def gla(
    s: MagnitudeSpectrogram,
    params: ReconstructionParams = ReconstructionParams(iterations=60),
    observer: Observer | None = None,
    target_len: int | None = None,
) -> ReconstructionResult:
    """Classic Griffin-Lim. ``params.alpha`` is ignored.

    The residual at iteration ``i`` is ``||abs(t_i) - s||_F / ||s||_F``, the
    distance of the consistent iterate to the set of spectrograms with the
    target magnitudes, with norms taken over the two-sided spectrum (see
    :func:`phasefast.stft.bin_weights`).  It is non-increasing for this loop.  ``observer`` is
    called after each iteration with ``(i, residual, elapsed_ms)`` where
    ``elapsed_ms`` is measured from the start of the run.
    """
    return _run(s, params, observer, target_len, alpha=None, algo="gla")


def fgla(
    s: MagnitudeSpectrogram,
    params: ReconstructionParams = ReconstructionParams(),
    observer: Observer | None = None,
    target_len: int | None = None,
) -> ReconstructionResult:
    """Fast Griffin-Lim with momentum ``params.alpha``.

    Same residual and observer conventions as :func:`gla`.  The residual
    trace is not monotone in general.
    """
    return _run(s, params, observer, target_len, alpha=float(params.alpha), algo="fgla")


def reconstruct(
    s: MagnitudeSpectrogram,
    algo: str,
    params: ReconstructionParams,
    observer: Observer | None = None,
    target_len: int | None = None,
) -> ReconstructionResult:
    if algo == "gla":
        return gla(s, params, observer, target_len)
    if algo == "fgla":
        return fgla(s, params, observer, target_len)
    raise InvalidParamError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
