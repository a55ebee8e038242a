"""Structural gate-count scaling for every SELECT variant.

Writes one CSV row per (variant, n) and prints the fitted log-log slope per
cost model.

    python3 scripts/scaling_study.py --n-range 8:32 --out results/scaling.csv
"""

import argparse
import sys
from pathlib import Path

from qconv.resources import count_variant, interior_count, scaling_study
from qconv.synthesis import SelectVariant

MODELS = {
    SelectVariant.DIRECT: ("macro", "cnot"),
    SelectVariant.COMPILED: ("macro", "cnot"),
    SelectVariant.QFT: ("phase", "gates"),
    SelectVariant.RIPPLE: ("macro", "cnot"),
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-range", default="8:32")
    parser.add_argument("--out", help="CSV path (default: stdout)")
    args = parser.parse_args(argv)
    lo, hi = (int(v) for v in args.n_range.split(":"))
    ns = range(lo, hi + 1)

    rows = ["variant,n,macro,cnot,phase,gates"]
    for variant in SelectVariant:
        for n in ns:
            rep = count_variant(variant, n)
            counts = [interior_count(rep, m) for m in ("macro", "cnot", "phase", "gates")]
            rows.append(",".join([variant.value, str(n), *map(str, counts)]))
    text = "\n".join(rows) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)

    for variant, models in MODELS.items():
        for model in models:
            s = scaling_study(variant, model, list(ns))
            print(f"{variant.value:9s} {model:6s} slope={s.fitted_slope:.3f} r2={s.r_squared:.5f}", file=sys.stderr)


if __name__ == "__main__":
    main()
