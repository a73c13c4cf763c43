#!/usr/bin/env python3
"""Run the built-in scenarios and print their artifact reports.

By default every registered scenario runs.  Pass names to restrict the set,
--json DIR to also write one JSON document per scenario.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qhist import SCENARIOS, run_scenario
from qhist.serialize import dumps_json, dumps_pretty, scenario_document


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", metavar="NAME",
                        help=f"scenarios to run (default: all of "
                             f"{', '.join(sorted(SCENARIOS))})")
    parser.add_argument("--json", type=pathlib.Path, metavar="DIR",
                        help="also write one JSON document per scenario")
    args = parser.parse_args(argv)

    names = args.names or sorted(SCENARIOS)
    unknown = [n for n in names if n not in SCENARIOS]
    if unknown:
        parser.error(f"unknown scenario(s): {', '.join(unknown)}; "
                     f"choose from {', '.join(sorted(SCENARIOS))}")

    if args.json:
        args.json.mkdir(parents=True, exist_ok=True)

    for i, name in enumerate(names):
        if i:
            print()
        doc = scenario_document(run_scenario(name))
        print(dumps_pretty(doc), end="")
        if args.json:
            path = args.json / f"{name}.json"
            path.write_text(dumps_json(doc))
            print(f"\nwrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
