"""Benchmark protocol and convergence experiments over a clip corpus."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .audio_io import load_wav
from .errors import DomainError, InvalidParamError
from .metrics import (
    DEFAULT_OVERLAY_LEN,
    ConvergenceTrace,
    TimingStats,
    fft_overlay,
    overlay_distance,
    snr_db,
    spectral_convergence,
    time_synthesis,
)
from .reconstruction import ALGORITHMS, InitStrategy, ReconstructionParams, reconstruct
from .stft import Signal, StftConfig, analyze, magnitude

DEFAULT_TOKENS = ("gla:20", "gla:30", "gla:60", "fgla:20", "fgla:30", "fgla:60")


@dataclass(frozen=True)
class BenchRecord:
    clip_id: str
    algo: str
    iterations: int
    alpha: float
    timing: TimingStats
    final_spectral_convergence: float
    snr_db: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["timing"] = self.timing.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> BenchRecord:
        return cls(**{**d, "timing": TimingStats(**d["timing"])})


def mean_delay_reduction_pct(records: Sequence[BenchRecord]) -> float:
    """``100 * (1 - mean_fgla / mean_gla)`` over clips that have both algorithms.

    Each side is the average over clips of the per-clip mean delay.
    """
    by_clip: dict[str, dict[str, float]] = {}
    for r in records:
        by_clip.setdefault(r.clip_id, {})[r.algo] = r.timing.mean_ms
    paired = [d for d in by_clip.values() if "gla" in d and "fgla" in d]
    if not paired:
        raise DomainError("no clip has both a gla and an fgla record")
    mean_gla = float(np.mean([d["gla"] for d in paired]))
    mean_fgla = float(np.mean([d["fgla"] for d in paired]))
    return 100.0 * (1.0 - mean_fgla / mean_gla)


@dataclass
class BenchReport:
    records: list[BenchRecord]
    mean_delay_reduction_pct: float
    settings: dict = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: list[BenchRecord], settings: dict | None = None) -> BenchReport:
        return cls(records, mean_delay_reduction_pct(records), dict(settings or {}))

    def is_consistent(self) -> bool:
        return self.mean_delay_reduction_pct == mean_delay_reduction_pct(self.records)

    def to_dict(self) -> dict:
        return {
            "settings": self.settings,
            "records": [r.to_dict() for r in self.records],
            "aggregate": {"mean_delay_reduction_pct": self.mean_delay_reduction_pct},
        }

    @classmethod
    def from_dict(cls, d: dict) -> BenchReport:
        return cls(
            [BenchRecord.from_dict(r) for r in d["records"]],
            d["aggregate"]["mean_delay_reduction_pct"],
            d.get("settings", {}),
        )


def load_corpus(directory) -> list[tuple[str, Signal]]:
    paths = sorted(Path(directory).glob("*.wav"))
    if not paths:
        raise DomainError(f"no .wav clips in {directory}")
    return [(p.stem, load_wav(p)) for p in paths]


def run_bench(
    clips: Iterable[tuple[str, Signal]],
    cfg_for,
    gla_iterations: int = 60,
    fgla_iterations: int = 30,
    alpha: float = 0.2,
    repeats: int = 10,
    init: InitStrategy = InitStrategy(),
    progress=None,
) -> BenchReport:
    """Time GLA and FGLA on every clip, one warm-up plus ``repeats`` runs each.

    ``cfg_for`` maps a sample rate to the :class:`StftConfig` to use.
    """
    runs = (
        ("gla", ReconstructionParams(gla_iterations, 0.0, init)),
        ("fgla", ReconstructionParams(fgla_iterations, alpha, init)),
    )
    records = []
    for clip_id, x in clips:
        cfg = cfg_for(x.sample_rate)
        s = magnitude(analyze(x, cfg))
        n = len(x)
        for algo, params in runs:
            result = reconstruct(s, algo, params, target_len=n)
            timing = time_synthesis(lambda: reconstruct(s, algo, params, target_len=n), repeats)
            rec = BenchRecord(
                clip_id=clip_id,
                algo=algo,
                iterations=params.iterations,
                alpha=params.alpha,
                timing=timing,
                final_spectral_convergence=spectral_convergence(s, result.waveform),
                snr_db=snr_db(x, result.waveform),
            )
            if progress is not None:
                progress(rec)
            records.append(rec)
    settings = {
        "gla_iterations": gla_iterations,
        "fgla_iterations": fgla_iterations,
        "alpha": alpha,
        "repeats": repeats,
        "init": init.kind,
        "seed": init.seed,
    }
    return BenchReport.from_records(records, settings)


def parse_tokens(spec: str | Sequence[str]) -> list[tuple[str, int]]:
    """Parse ``"gla:20,fgla:30"`` into ``[("gla", 20), ("fgla", 30)]``."""
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    out = []
    for item in items:
        algo, sep, iters = item.strip().partition(":")
        if not sep or algo not in ALGORITHMS or not iters.isdigit() or int(iters) < 1:
            raise InvalidParamError(f"malformed token {item!r}; expected <gla|fgla>:<iterations>")
        out.append((algo, int(iters)))
    if not out:
        raise InvalidParamError("empty token list")
    return out


def run_convergence(
    x: Signal,
    cfg: StftConfig,
    tokens: Sequence[tuple[str, int]],
    alpha: float = 0.2,
    init: InitStrategy = InitStrategy(),
    overlay_len: int = DEFAULT_OVERLAY_LEN,
) -> list[ConvergenceTrace]:
    s = magnitude(analyze(x, cfg))
    traces = []
    for algo, iters in tokens:
        a = alpha if algo == "fgla" else 0.0
        result = reconstruct(s, algo, ReconstructionParams(iters, a, init), target_len=len(x))
        traces.append(ConvergenceTrace(algo, iters, a, result.residual_trace, fft_overlay(result.waveform, overlay_len)))
    return traces


def pairwise_distances(traces: Sequence[ConvergenceTrace]) -> dict[tuple[str, str], float]:
    return {
        (a.token, b.token): overlay_distance(a.fft_overlay, b.fft_overlay)
        for a, b in itertools.combinations(traces, 2)
    }
