"""Write residual traces and FFT overlays for every bundled clip, plus a distance summary."""

import argparse
import sys
from pathlib import Path

from phasefast.cli import main as cli
from phasefast.corpus import corpus_paths


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", type=Path)
    parser.add_argument("--alpha", default="0.2")
    args = parser.parse_args()
    for path in corpus_paths():
        code = cli(["convergence", str(path), str(args.outdir / path.stem), "--alpha", args.alpha])
        if code:
            sys.exit(code)


if __name__ == "__main__":
    main()
