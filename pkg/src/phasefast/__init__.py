"""Griffin-Lim and Fast Griffin-Lim phase reconstruction over an STFT frame."""

from .errors import (
    ConfigError,
    DomainError,
    InvalidParamError,
    NonInvertibleConfigError,
    ObserverError,
    PhasefastError,
    UndefinedMetricError,
    UnsupportedFormatError,
    WavParseError,
)
from .metrics import (
    ConvergenceTrace,
    TimingStats,
    fft_overlay,
    overlay_distance,
    snr_db,
    spectral_convergence,
    time_synthesis,
)
from .reconstruction import (
    InitStrategy,
    ReconstructionParams,
    ReconstructionResult,
    fgla,
    gla,
    init_coefficients,
    project_consistent,
    project_magnitude,
    reconstruct,
)
from .stft import (
    ColaReport,
    ComplexSpectrogram,
    MagnitudeSpectrogram,
    Signal,
    StftConfig,
    analyze,
    magnitude,
    make_window,
    synthesize,
    validate_cola,
)

__version__ = "0.1.0"
