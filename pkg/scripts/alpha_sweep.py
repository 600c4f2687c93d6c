"""Final spectral convergence of FGLA-30 relative to GLA-60 for a range of momentum values.

Prints one CSV row per (clip, alpha); plotting is left to the reader.
"""

import argparse

from phasefast import ReconstructionParams, StftConfig, analyze, fgla, gla, magnitude, spectral_convergence
from phasefast.bench import load_corpus
from phasefast.corpus import CORPUS_DIR


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alphas", default="0,0.2,0.4,0.5,0.6,0.8,0.9,0.95")
    parser.add_argument("--fgla-iterations", type=int, default=30)
    parser.add_argument("--gla-iterations", type=int, default=60)
    args = parser.parse_args()
    alphas = [float(a) for a in args.alphas.split(",")]

    cfg = StftConfig.default()
    print("clip,alpha,sc_gla,sc_fgla,ratio")
    for name, x in load_corpus(CORPUS_DIR):
        s = magnitude(analyze(x, cfg))
        base = spectral_convergence(s, gla(s, ReconstructionParams(args.gla_iterations), target_len=len(x)).waveform)
        for a in alphas:
            result = fgla(s, ReconstructionParams(args.fgla_iterations, a), target_len=len(x))
            sc = spectral_convergence(s, result.waveform)
            print(f"{name},{a},{base:.6f},{sc:.6f},{sc / base:.4f}")


if __name__ == "__main__":
    main()
