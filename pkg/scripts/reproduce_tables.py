"""Regenerate the sweep tables from the JSON configs in ``configs/``.

Usage: python scripts/reproduce_tables.py [--outdir results]
"""

import argparse
import pathlib
import sys

from conflictruin.cli import run

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default=str(ROOT / "results"))
    parser.add_argument("--configs", default=str(ROOT / "configs"))
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    status = 0
    for cfg in sorted(pathlib.Path(args.configs).glob("*.json")):
        target = outdir / (cfg.stem + ".csv")
        code = run(["sweep", "--config", str(cfg), "--out", str(target)])
        print(f"{cfg.name} -> {target} (exit {code})")
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
