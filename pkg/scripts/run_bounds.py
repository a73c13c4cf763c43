#!/usr/bin/env python3
"""Reproduce the headline bound values in one run.

Prints the classical CHSH comparator, the optimized temporal functional,
the two-pair sum in both evaluation modes, and the chained totals, each next
to its target.  With --out DIR the same reports are written as JSON.
"""

import argparse
import math
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qhist import (
    chained_bell,
    chained_classical_bound,
    classical_bound_bruteforce,
    monogamy_preset_settings,
    monogamy_sum,
    optimize_settings,
    tsirelson_settings,
)
from qhist.bell import CHAINED, INDEPENDENT
from qhist.linalg import maximally_mixed
from qhist.serialize import document, dumps_json, to_jsonable

SQRT2 = math.sqrt(2.0)


def row(label: str, value: float, target: float) -> None:
    print(f"  {label:<44} {value:>14.10f}  target {target:>14.10f}  "
          f"err {abs(value - target):.2e}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--chain-max", type=int, default=8,
                        help="largest chain length to evaluate (default 8)")
    parser.add_argument("--skip-classical", action="store_true",
                        help="skip the brute-force classical comparators")
    parser.add_argument("--out", type=pathlib.Path,
                        help="directory for JSON copies of each report")
    args = parser.parse_args(argv)

    docs = {}

    print("classical comparator")
    if args.skip_classical:
        print("  (skipped)")
    else:
        bound = classical_bound_bruteforce()
        row("deterministic CHSH maximum", bound, 2.0)
        docs["classical"] = document("classical-bound", {"value": bound})

    print("optimized temporal functional")
    opt = optimize_settings("s_lgi")
    row("best value over Bloch settings", opt.value, 2.0 * SQRT2)
    print(f"  converged={opt.converged} after {opt.evaluations} evaluations")
    docs["optimize"] = document(
        "optimize", {"value": opt.value, "converged": opt.converged,
                     "evaluations": opt.evaluations, "angles": opt.angles})

    print("two-pair sum (preset settings, maximally mixed input)")
    a, b, c = monogamy_preset_settings()
    for mode in (INDEPENDENT, CHAINED):
        res = monogamy_sum(maximally_mixed(2), a, b, c, mode=mode)
        row(f"{mode} total", res.total, 4.0 * SQRT2)
        docs[f"monogamy-{mode}"] = document(
            "monogamy", {"mode": mode, "total": res.total,
                         "spatial_reference": res.spatial_reference})
    print(f"  spatial reference cap: {4.0}")

    print("chained totals")
    firsts, seconds = tsirelson_settings()
    chain_rows = []
    for n in range(1, args.chain_max + 1):
        res = chained_bell(n, firsts, seconds)
        row(f"n={n}", res.total, 2.0 * SQRT2 * n)
        entry = {"n": n, "total": res.total,
                 "quantum_bound": res.quantum_bound,
                 "classical_bound": res.classical_bound}
        if not args.skip_classical:
            entry["classical_bruteforce"] = chained_classical_bound(n)
        chain_rows.append(entry)
    docs["chained"] = document("chained", {"rows": to_jsonable(chain_rows)})

    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        for stem, doc in docs.items():
            path = args.out / f"{stem}.json"
            path.write_text(dumps_json(doc))
            print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
