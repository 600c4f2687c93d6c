"""Time GLA-60 against FGLA-30 on the bundled corpus and print a per-clip table."""

import argparse
import json
from pathlib import Path

from phasefast import StftConfig
from phasefast.bench import load_corpus, run_bench
from phasefast.corpus import CORPUS_DIR


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", type=Path, default=CORPUS_DIR)
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--alpha", type=float, default=0.2)
    parser.add_argument("--out", type=Path, help="also write the JSON report here")
    args = parser.parse_args()

    report = run_bench(load_corpus(args.corpus), StftConfig.default, alpha=args.alpha, repeats=args.repeats)
    rows = {}
    for r in report.records:
        rows.setdefault(r.clip_id, {})[r.algo] = r
    print(f"{'clip':<8}{'gla-60 ms':>12}{'fgla-30 ms':>12}{'speedup':>9}{'sc gla':>9}{'sc fgla':>9}")
    for clip_id, pair in rows.items():
        g, f = pair["gla"], pair["fgla"]
        print(
            f"{clip_id:<8}{g.timing.mean_ms:>12.1f}{f.timing.mean_ms:>12.1f}"
            f"{g.timing.mean_ms / f.timing.mean_ms:>9.2f}"
            f"{g.final_spectral_convergence:>9.4f}{f.final_spectral_convergence:>9.4f}"
        )
    print(f"mean delay reduction {report.mean_delay_reduction_pct:.2f}%")
    if args.out:
        args.out.write_text(json.dumps(report.to_dict(), indent=2) + "\n")


if __name__ == "__main__":
    main()
