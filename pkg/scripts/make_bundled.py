"""Regenerate the bundled synthetic corpus under src/eventlens/data/bundled."""

import argparse

from eventlens import synth

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(synth.bundled_dir()))
    args = ap.parse_args()
    synth.write_bundle(args.out)
    print(f"wrote bundle to {args.out}")
