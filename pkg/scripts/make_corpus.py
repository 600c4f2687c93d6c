"""Regenerate the bundled test clips under src/phasefast/data/corpus."""

import argparse
from pathlib import Path

from phasefast.audio_io import save_wav
from phasefast.corpus import CLIPS, CORPUS_DIR, make_clip


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=CORPUS_DIR)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for spec in CLIPS:
        x = make_clip(spec)
        path = args.out / f"{spec.clip_id}.wav"
        save_wav(path, x)
        print(f"{path}  {x.duration:.2f} s")


if __name__ == "__main__":
    main()
