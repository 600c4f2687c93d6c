"""Command-line entry point.

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or parameters.
``PHASEFAST_SEED`` in the environment overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audio_io import load_magnitude, load_wav, save_magnitude, save_wav
from .bench import DEFAULT_TOKENS, load_corpus, pairwise_distances, parse_tokens, run_bench, run_convergence
from .corpus import CORPUS_DIR
from .errors import (
    ConfigError,
    DomainError,
    InvalidParamError,
    NonInvertibleConfigError,
    ObserverError,
    UndefinedMetricError,
    UnsupportedFormatError,
    WavParseError,
)
from .metrics import DEFAULT_OVERLAY_LEN
from .reconstruction import InitStrategy, ReconstructionParams, reconstruct
from .stft import StftConfig, analyze, magnitude, next_pow2, validate_cola

log = logging.getLogger("phasefast")

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2
DEFAULT_SAMPLE_RATE = 20000
DEFAULT_ITERATIONS = {"gla": 60, "fgla": 30}

VALIDATION_ERRORS = (ConfigError, InvalidParamError, DomainError, UndefinedMetricError)
IO_ERRORS = (OSError, WavParseError, UnsupportedFormatError)


def _add_stft_args(p: argparse.ArgumentParser, sample_rate_default=None):
    g = p.add_argument_group("STFT")
    g.add_argument("--sample-rate", type=int, default=sample_rate_default,
                   help="expected sample rate in Hz (default: taken from the input)")
    g.add_argument("--hop-ms", type=float, default=12.5, help="frame shift in ms (default 12.5)")
    g.add_argument("--hop", type=int, help="frame shift in samples; overrides --hop-ms")
    g.add_argument("--window", type=int, help="window length in samples (default 4 x hop)")
    g.add_argument("--fft", type=int, help="FFT length (default next power of two >= window)")


def _add_algo_args(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=0.2, help="FGLA momentum in [0, 1) (default 0.2)")
    p.add_argument("--init", choices=("zero_phase", "random_phase"), default="zero_phase")
    p.add_argument("--seed", type=int, default=0, help="seed for --init random_phase")


def _stft_config(args, sample_rate: int | None) -> StftConfig:
    sr = sample_rate if args.sample_rate is None else args.sample_rate
    if sample_rate is not None and args.sample_rate is not None and args.sample_rate != sample_rate:
        raise ConfigError(f"input is {sample_rate} Hz but --sample-rate is {args.sample_rate} Hz; resampling is not supported")
    if sr is None:
        sr = DEFAULT_SAMPLE_RATE
    hop = args.hop if args.hop is not None else int(round(sr * args.hop_ms / 1000.0))
    window = args.window if args.window is not None else 4 * hop
    fft = args.fft if args.fft is not None else next_pow2(window)
    return StftConfig(window, hop, fft, sr)


def _init(args) -> InitStrategy:
    seed = args.seed
    env = os.environ.get("PHASEFAST_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise InvalidParamError(f"PHASEFAST_SEED must be an integer, got {env!r}") from None
    return InitStrategy(args.init, seed)


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _trace_rows(residuals, elapsed):
    for i, (r, e) in enumerate(zip(residuals, elapsed), start=1):
        yield str(i), repr(float(r)), f"{e:.3f}"


def cmd_reconstruct(args) -> int:
    src = Path(args.input)
    if src.suffix.lower() == ".json":
        s = load_magnitude(src)
        if args.sample_rate is not None and args.sample_rate != s.config.sample_rate:
            raise ConfigError(f"spectrogram is {s.config.sample_rate} Hz but --sample-rate is {args.sample_rate} Hz")
        target_len = None
    else:
        x = load_wav(src)
        cfg = _stft_config(args, x.sample_rate)
        s = magnitude(analyze(x, cfg))
        target_len = len(x)
    iterations = args.iterations or DEFAULT_ITERATIONS[args.algo]
    params = ReconstructionParams(iterations, args.alpha, _init(args), args.tolerance)
    elapsed = []
    result = reconstruct(s, args.algo, params, observer=lambda i, r, ms: elapsed.append(ms), target_len=target_len)
    clipped = save_wav(args.output, result.waveform)
    if clipped:
        log.warning("%d samples clipped while writing %s", clipped, args.output)
    if args.trace:
        _write_csv(Path(args.trace), "iteration,residual,elapsed_ms", _trace_rows(result.residual_trace, elapsed))
    print(f"{args.algo} x{len(result.residual_trace)}: residual {result.final_residual:.6g}, {result.total_time:.1f} ms -> {args.output}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    x = load_wav(args.input)
    cfg = _stft_config(args, x.sample_rate)
    s = magnitude(analyze(x, cfg))
    save_magnitude(args.output, s)
    print(f"{s.shape[0]} bins x {s.shape[1]} frames -> {args.output}")
    return EXIT_OK


def cmd_bench(args) -> int:
    clips = load_corpus(args.corpus)

    def progress(rec):
        print(f"{rec.clip_id:>12} {rec.algo:>4}-{rec.iterations:<3} mean {rec.timing.mean_ms:9.2f} ms "
              f"sc {rec.final_spectral_convergence:.4f}", file=sys.stderr)

    report = run_bench(
        clips,
        lambda sr: _stft_config(args, sr),
        gla_iterations=args.gla_iterations,
        fgla_iterations=args.fgla_iterations,
        alpha=args.alpha,
        repeats=args.repeats,
        init=_init(args),
        progress=progress,
    )
    Path(args.out).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(f"mean delay reduction {report.mean_delay_reduction_pct:.2f}% -> {args.out}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    tokens = parse_tokens(args.tokens)
    x = load_wav(args.input)
    cfg = _stft_config(args, x.sample_rate)
    traces = run_convergence(x, cfg, tokens, args.alpha, _init(args), args.overlay_length)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    for tr in traces:
        rows = ((str(i), repr(float(r))) for i, r in enumerate(tr.residuals, start=1))
        _write_csv(out / f"{stem}_{tr.algo}_{tr.iterations}.csv", "iteration,residual", rows)
    columns = np.column_stack([tr.fft_overlay for tr in traces])
    rows = ([str(k)] + [repr(float(v)) for v in row] for k, row in enumerate(columns))
    _write_csv(out / f"{stem}_overlay.csv", "bin," + ",".join(tr.token for tr in traces), rows)
    summary = " ".join(f"{a}~{b}={d:.6f}" for (a, b), d in pairwise_distances(traces).items())
    print(f"overlay_distance {summary}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _stft_config(args, None)
    report = validate_cola(cfg)
    n_samples = int(round(args.duration * cfg.sample_rate))
    print(f"sample_rate {cfg.sample_rate} Hz")
    print(f"window {cfg.window_length} samples = {cfg.window_ms:g} ms")
    print(f"hop {cfg.hop_length} samples = {cfg.hop_ms:g} ms")
    print(f"fft {cfg.fft_length}")
    print(f"M = {cfg.n_bins} bins, N = {cfg.n_frames(n_samples)} frames for {args.duration:g} s")
    print(f"cola {report}")
    if not report.ok:
        raise NonInvertibleConfigError(f"envelope deviation {report.deviation:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasefast", description="Griffin-Lim and Fast Griffin-Lim spectrogram inversion")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reconstruct", help="reconstruct a waveform from a WAV or a magnitude file")
    p.add_argument("input", help="input .wav, or a magnitude header .json with its .f32 sidecar")
    p.add_argument("output", help="output .wav")
    p.add_argument("--algo", choices=("gla", "fgla"), default="fgla")
    p.add_argument("--iterations", type=int, help="default 60 for gla, 30 for fgla")
    p.add_argument("--tolerance", type=float, help="stop early once the residual falls below this")
    p.add_argument("--trace", help="write iteration,residual,elapsed_ms CSV here")
    _add_algo_args(p)
    _add_stft_args(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("analyze", help="write the magnitude spectrogram of a WAV file")
    p.add_argument("input")
    p.add_argument("output", help="header .json path; payload goes to the matching .f32")
    _add_stft_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="time GLA vs FGLA over a corpus")
    p.add_argument("corpus", nargs="?", default=str(CORPUS_DIR), help="directory of .wav clips (default: bundled)")
    p.add_argument("--out", default="bench_report.json")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--gla-iterations", type=int, default=60)
    p.add_argument("--fgla-iterations", type=int, default=30)
    _add_algo_args(p)
    _add_stft_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("convergence", help="residual traces and FFT overlays for several runs")
    p.add_argument("input")
    p.add_argument("outdir")
    p.add_argument("--tokens", default=",".join(DEFAULT_TOKENS), help="comma list of algo:iterations")
    p.add_argument("--overlay-length", type=int, default=DEFAULT_OVERLAY_LEN)
    _add_algo_args(p)
    _add_stft_args(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("validate", help="check an STFT configuration")
    p.add_argument("--duration", type=float, default=1.0, help="signal length in seconds used to report N")
    _add_stft_args(p, sample_rate_default=DEFAULT_SAMPLE_RATE)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"phasefast {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IO_ERRORS as exc:
        print(f"phasefast {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ObserverError as exc:
        print(f"phasefast {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
