import numpy as np
import pytest

from phasefast import MagnitudeSpectrogram, Signal, StftConfig, analyze, magnitude
from phasefast.audio_io import load_wav
from phasefast.corpus import corpus_paths

SR = 20000


@pytest.fixture(scope="session")
def cfg():
    return StftConfig.default()


@pytest.fixture(scope="session")
def corpus():
    return [(p.stem, load_wav(p)) for p in corpus_paths()]


@pytest.fixture(scope="session")
def clip(corpus):
    return corpus[0][1]


def sine(freq, seconds=1.0, sr=SR, amp=0.5):
    t = np.arange(int(round(seconds * sr))) / sr
    return Signal(amp * np.sin(2 * np.pi * freq * t), sr)


@pytest.fixture(scope="session")
def frame_periodic_sine():
    # 800 Hz repeats exactly every hop (250 samples at 20 kHz)
    return sine(800.0)


@pytest.fixture(scope="session")
def sine_mag(cfg, frame_periodic_sine):
    return magnitude(analyze(frame_periodic_sine, cfg))


def small_cfg(window=16, hop=4, fft=16, sr=8000):
    return StftConfig(window, hop, fft, sr)


def random_magnitudes(rng, cfg, n_frames):
    return MagnitudeSpectrogram(rng.random((cfg.n_bins, n_frames)) ** rng.uniform(0.5, 3.0), cfg)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
