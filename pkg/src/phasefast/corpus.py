"""Deterministic speech-like test clips.

Each clip is a source-filter synthesis: a glottal pulse train with a
time-varying pitch contour drives a cascade of formant resonators, with
voiceless noise segments and pauses in between.  Durations vary like short
spoken sentences.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .stft import Signal

SAMPLE_RATE = 20000
CORPUS_DIR = Path(__file__).parent / "data" / "corpus"

# rough (F1, F2, F3) in Hz for a handful of vowels
_VOWELS = np.array(
    [
        [730, 1090, 2440],
        [270, 2290, 3010],
        [300, 870, 2240],
        [530, 1840, 2480],
        [570, 840, 2410],
        [660, 1720, 2410],
        [440, 1020, 2240],
    ],
    dtype=float,
)
_BANDWIDTHS = np.array([80.0, 100.0, 140.0])


@dataclass(frozen=True)
class ClipSpec:
    clip_id: str
    duration: float
    f0: float
    seed: int


CLIPS = (
    ClipSpec("clip1", 1.6, 120.0, 11),
    ClipSpec("clip2", 2.2, 210.0, 22),
    ClipSpec("clip3", 2.8, 140.0, 33),
    ClipSpec("clip4", 3.4, 185.0, 44),
    ClipSpec("clip5", 4.0, 105.0, 55),
)


def _resonator(x: np.ndarray, freq: float, bw: float, sr: int) -> np.ndarray:
    r = np.exp(-np.pi * bw / sr)
    theta = 2 * np.pi * freq / sr
    a = [1.0, -2 * r * np.cos(theta), r * r]
    return lfilter([1.0 - r], a, x)


def _voiced(n: int, f0_contour: np.ndarray, formants: np.ndarray, sr: int, rng) -> np.ndarray:
    phase = np.cumsum(f0_contour / sr)
    pulses = np.zeros(n)
    idx = np.nonzero(np.diff(np.floor(phase), prepend=0.0) > 0)[0]
    pulses[idx] = 1.0 + 0.05 * rng.standard_normal(len(idx))
    # glottal shaping: two-pole low-pass
    src = lfilter([1.0], [1.0, -1.8, 0.81], pulses)
    src += 0.01 * rng.standard_normal(n)
    out = src
    for f, bw in zip(formants, _BANDWIDTHS):
        out = _resonator(out, f, bw, sr)
    return out


def _fricative(n: int, sr: int, rng) -> np.ndarray:
    noise = rng.standard_normal(n)
    centre = rng.uniform(3000, 6000)
    return 0.3 * _resonator(noise, centre, 1500.0, sr)


def make_clip(spec: ClipSpec, sample_rate: int = SAMPLE_RATE) -> Signal:
    rng = np.random.default_rng(spec.seed)
    n_total = int(round(spec.duration * sample_rate))
    out = np.zeros(n_total)
    pos = int(0.05 * sample_rate)
    while pos < n_total - int(0.05 * sample_rate):
        kind = rng.choice(["vowel", "vowel", "vowel", "fric", "pause"])
        seg = int(rng.uniform(0.08, 0.25) * sample_rate)
        seg = min(seg, n_total - pos)
        t = np.arange(seg) / sample_rate
        if kind == "vowel":
            drift = rng.uniform(-0.25, 0.25)
            f0 = spec.f0 * (1 + drift * t / max(t[-1], 1e-9)) * (1 + 0.03 * np.sin(2 * np.pi * 5.5 * t))
            v0, v1 = _VOWELS[rng.integers(len(_VOWELS), size=2)]
            mix = np.linspace(0.0, 1.0, seg)[:, None]
            # formants glide piecewise-constantly between two vowels
            blocks = 8
            formants_seq = np.repeat((1 - mix) * v0 + mix * v1, 1, axis=0)
            piece = np.zeros(seg)
            edges = np.linspace(0, seg, blocks + 1).astype(int)
            for a, b in zip(edges[:-1], edges[1:]):
                if b > a:
                    piece[a:b] = _voiced(b - a, f0[a:b], formants_seq[(a + b) // 2], sample_rate, rng)
            env = np.sin(np.pi * np.arange(seg) / seg) ** 0.5
            out[pos : pos + seg] += piece * env
        elif kind == "fric":
            env = np.hanning(seg)
            out[pos : pos + seg] += _fricative(seg, sample_rate, rng) * env
        pos += seg
    peak = np.max(np.abs(out))
    if peak > 0:
        out *= 0.9 / peak
    return Signal(out, sample_rate)


def corpus_paths(directory: Path | None = None) -> list[Path]:
    directory = CORPUS_DIR if directory is None else Path(directory)
    return sorted(directory.glob("*.wav"))
