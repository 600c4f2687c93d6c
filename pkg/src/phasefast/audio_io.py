"""PCM16 mono WAV codec and the magnitude-spectrogram file format.

Spectrogram files are a JSON header (``<name>.json``) plus a sidecar of
row-major little-endian float32 magnitudes (``<name>.f32``).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedFormatError, WavParseError
from .stft import MagnitudeSpectrogram, Signal, StftConfig

PCM = 1
SPEC_VERSION = 1


@dataclass(frozen=True, eq=False)
class WavFile:
    signal: Signal
    source_bit_depth: int = 16


def _chunks(data: bytes):
    """Yield ``(chunk_id, body_offset, size)`` for every chunk after the RIFF header."""
    if len(data) < 12:
        raise WavParseError("file shorter than the 12-byte RIFF header", len(data))
    if data[0:4] != b"RIFF":
        raise WavParseError("missing RIFF magic", 0)
    if data[8:12] != b"WAVE":
        raise WavParseError("missing WAVE form type", 8)
    riff_size = struct.unpack_from("<I", data, 4)[0]
    # chunks may not run past the RIFF body nor past the bytes actually present
    end = min(8 + riff_size, len(data))
    pos = 12
    while pos < end:
        if pos + 8 > end:
            raise WavParseError("truncated chunk header", pos)
        cid = data[pos : pos + 4]
        size = struct.unpack_from("<I", data, pos + 4)[0]
        body = pos + 8
        if body + size > end:
            raise WavParseError(f"chunk {cid!r} declares {size} bytes, only {end - body} remain", end)
        yield cid, body, size
        pos = body + size + (size & 1)


def read_wav(data: bytes) -> WavFile:
    fmt = None
    samples = None
    for cid, body, size in _chunks(bytes(data)):
        if cid == b"fmt ":
            if size < 16:
                raise WavParseError(f"fmt chunk is {size} bytes, need 16", body)
            fmt = struct.unpack_from("<HHIIHH", data, body)
        elif cid == b"data":
            if fmt is None:
                raise WavParseError("data chunk before fmt chunk", body - 8)
            samples = (body, size)
    if fmt is None:
        raise WavParseError("no fmt chunk", 12)
    audio_format, channels, rate, _, _, bits = fmt
    if audio_format != PCM:
        raise UnsupportedFormatError("audio_format", audio_format)
    if channels != 1:
        raise UnsupportedFormatError("num_channels", channels)
    if bits != 16:
        raise UnsupportedFormatError("bits_per_sample", bits)
    if rate == 0:
        raise UnsupportedFormatError("sample_rate", rate)
    if samples is None:
        raise WavParseError("no data chunk", len(data))
    body, size = samples
    if size % 2:
        raise WavParseError(f"data chunk size {size} is not a whole number of 16-bit samples", body + size - 1)
    words = np.frombuffer(data, dtype="<i2", count=size // 2, offset=body)
    return WavFile(Signal(words / 32768.0, rate))


def quantize(x: np.ndarray) -> tuple[np.ndarray, int]:
    """Round half away from zero onto the 16-bit grid; return words and the clip count.

    Scaling by 32768 mirrors :func:`read_wav`, so decoded words re-encode to
    themselves.  Only +1.0 and above lose precision to the clamp.
    """
    v = np.asarray(x, dtype=np.float64) * 32768.0
    q = np.sign(v) * np.floor(np.abs(v) + 0.5)
    clipped = int(np.count_nonzero((q > 32767) | (q < -32768)))
    return np.clip(q, -32768, 32767).astype("<i2"), clipped


def write_wav(w: WavFile) -> tuple[bytes, int]:
    """Encode ``w`` as a canonical 44-byte-header PCM16 file.

    Returns the bytes and the number of samples that had to be clipped.
    """
    sig = w.signal
    words, clipped = quantize(sig.samples)
    payload = words.tobytes()
    rate = sig.sample_rate
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        PCM,
        1,
        rate,
        rate * 2,
        2,
        16,
        b"data",
        len(payload),
    )
    return header + payload, clipped


def load_wav(path) -> Signal:
    return read_wav(Path(path).read_bytes()).signal


def save_wav(path, signal: Signal) -> int:
    data, clipped = write_wav(WavFile(signal))
    Path(path).write_bytes(data)
    return clipped


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".f32")


def save_magnitude(path, s: MagnitudeSpectrogram) -> None:
    path = Path(path)
    cfg = s.config
    header = {
        "version": SPEC_VERSION,
        "sample_rate": cfg.sample_rate,
        "window_length": cfg.window_length,
        "hop_length": cfg.hop_length,
        "fft_length": cfg.fft_length,
        "bins": s.shape[0],
        "frames": s.shape[1],
    }
    path.write_text(json.dumps(header, indent=2) + "\n", encoding="utf-8")
    _sidecar(path).write_bytes(s.magnitudes.astype("<f4").tobytes(order="C"))


def load_magnitude(path) -> MagnitudeSpectrogram:
    path = Path(path)
    try:
        header = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise DomainError(f"{path}: header must be a JSON object")
    if header.get("version") != SPEC_VERSION:
        raise DomainError(f"{path}: unsupported spectrogram version {header.get('version')!r}")
    try:
        cfg = StftConfig(
            window_length=header["window_length"],
            hop_length=header["hop_length"],
            fft_length=header["fft_length"],
            sample_rate=header["sample_rate"],
        )
        bins, frames = int(header["bins"]), int(header["frames"])
    except KeyError as exc:
        raise ConfigError(f"{path}: header lacks field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: malformed header field: {exc}") from exc
    raw = _sidecar(path).read_bytes()
    if len(raw) != 4 * bins * frames:
        raise DomainError(f"{_sidecar(path)}: expected {4 * bins * frames} bytes, found {len(raw)}")
    mags = np.frombuffer(raw, dtype="<f4").reshape(bins, frames).astype(np.float64)
    return MagnitudeSpectrogram(mags, cfg)
