"""Command-line front end.

Subcommands: scenario, lgi, chained, monogamy, optimize, weight, abl.
Exit codes: 0 success, 2 input error, 3 optimizer flagged non-convergence,
4 impossible post-selection.  Identical arguments (including --seed) produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import serialize
from .bell import (
    CHAINED,
    INDEPENDENT,
    CorrelatorSpec,
    OptimizerConfig,
    chained_bell,
    monogamy_preset_settings,
    monogamy_sum,
    optimize_settings,
    s_lgi,
    tsirelson_settings,
)
from .errors import ImpossiblePostselectionError
from .histories import HistoryState, hs_norm, is_consistent_family, normalize, weight
from .linalg import maximally_mixed, projector
from .scenarios import SCENARIOS, run_scenario
from .twostate import TwoTimeExperiment, mixed_sequence_distribution, sequence_distribution, abl_probability

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NONCONVERGED = 3
EXIT_IMPOSSIBLE = 4


@dataclass
class RunConfig:
    """Plumbing shared by every subcommand."""

    command: str
    input_path: str | None = None
    output_format: str = "json"
    tolerance: float = 1e-9
    seed: int = 0
    out_path: str | None = None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "pretty"), default="json",
                        help="output format (default json)")
    common.add_argument("--tol", type=float, default=1e-9,
                        help="consistency tolerance override")
    common.add_argument("--seed", type=int, default=0, help="optimizer seed")
    common.add_argument("--out", default=None, help="write the report to this path")

    parser = argparse.ArgumentParser(prog="qhist", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", parents=[common], help="run a named scenario")
    p.add_argument("name")
    p.add_argument("--slots", type=int, default=None, help="slot count (temporal-ghz)")
    p.add_argument("--alpha", type=float, default=None, help="first branch amplitude")
    p.add_argument("--beta", type=float, default=None, help="second branch amplitude")
    p.add_argument("--psi", default=None, help="input state name (two-time-hab)")

    p = sub.add_parser("lgi", parents=[common], help="evaluate the two-time Bell functional")
    p.add_argument("--preset", choices=("tsirelson",), default=None)
    p.add_argument("--spec", default=None, help="JSON spec file (initial, first, second, unitary)")

    p = sub.add_parser("chained", parents=[common], help="evaluate the chained functional")
    p.add_argument("-n", type=int, default=None, help="number of chained blocks")
    p.add_argument("--preset", choices=("tsirelson",), default=None)
    p.add_argument("--spec", default=None)

    p = sub.add_parser("monogamy", parents=[common], help="evaluate the three-party sum")
    p.add_argument("--preset", choices=("paper",), default=None)
    p.add_argument("--mode", choices=("independent", "chained"), default="independent")
    p.add_argument("--spec", default=None)

    p = sub.add_parser("optimize", parents=[common], help="search settings for a functional")
    p.add_argument("--objective", choices=("s_lgi", "chained_bell", "monogamy_sum"),
                   default="s_lgi")
    p.add_argument("-n", type=int, default=1, help="blocks for chained_bell")
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--max-evals", type=int, default=None)

    p = sub.add_parser("weight", parents=[common], help="weight and consistency of a history file")
    p.add_argument("--spec", required=True, help="JSON history document")

    p = sub.add_parser("abl", parents=[common], help="pre/post-selected outcome distribution")
    p.add_argument("--spec", required=True, help="JSON experiment document")
    p.add_argument("--slot", type=int, default=None, help="slot for the single-slot probability")
    p.add_argument("--outcome", choices=("+", "-"), default=None)

    return parser


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (document, special_csv_or_None, exit_code)


def _settings_pair(doc, what: str):
    if not isinstance(doc, list) or len(doc) != 2:
        raise serialize.SpecError(f"{what}: expected a list of two settings")
    return tuple(serialize.setting_from_document(s, f"{what}[{i}]") for i, s in enumerate(doc))


def _initial_from_document(doc) -> np.ndarray:
    if doc is None or doc == "mixed":
        return maximally_mixed(2)
    ket = serialize.state_from_document(doc, "initial")
    return projector(ket)


def _run_scenario(args, config: RunConfig):
    if args.name not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise serialize.SpecError(f"unknown scenario {args.name!r}; known scenarios: {known}")
    kwargs = {}
    if args.slots is not None:
        kwargs["n_slots"] = args.slots
    if args.alpha is not None:
        kwargs["alpha"] = args.alpha
        if args.name == "temporal-ghz" and args.beta is None:
            kwargs["beta"] = math.sqrt(max(0.0, 1.0 - args.alpha**2))
    if args.beta is not None:
        kwargs["beta"] = args.beta
    if args.psi is not None:
        kwargs["psi"] = args.psi
    try:
        result = run_scenario(args.name, **kwargs)
    except TypeError as exc:
        raise serialize.SpecError(f"scenario {args.name}: {exc}") from None
    return serialize.scenario_document(result), None, EXIT_OK


def _run_lgi(args, config: RunConfig):
    if args.spec is not None:
        doc = serialize.load_document(args.spec)
        initial = _initial_from_document(doc.get("initial"))
        firsts = _settings_pair(doc.get("first"), "first")
        seconds = _settings_pair(doc.get("second"), "second")
        unitary = serialize.unitary_from_document(doc.get("unitary", "I"), "unitary")
    else:
        initial = maximally_mixed(2)
        firsts, seconds = tsirelson_settings()
        unitary = None
    report = s_lgi(CorrelatorSpec(initial, firsts, seconds, unitary))
    return serialize.document("lgi", serialize.to_jsonable(report)), None, EXIT_OK


def _run_chained(args, config: RunConfig):
    n = args.n
    if args.spec is not None:
        doc = serialize.load_document(args.spec)
        initial = _initial_from_document(doc.get("initial"))
        firsts = _settings_pair(doc.get("first"), "first")
        seconds = _settings_pair(doc.get("second"), "second")
        unitary = serialize.unitary_from_document(doc.get("unitary", "I"), "unitary")
        if n is None:
            n = int(doc.get("n", 1))
    else:
        initial = None
        firsts, seconds = tsirelson_settings()
        unitary = None
        if n is None:
            n = 1
    result = chained_bell(n, firsts, seconds, initial=initial, unitary=unitary)
    return serialize.document("chained", serialize.to_jsonable(result)), None, EXIT_OK


def _run_monogamy(args, config: RunConfig):
    mode = INDEPENDENT if args.mode == "independent" else CHAINED
    if args.spec is not None:
        doc = serialize.load_document(args.spec)
        initial = _initial_from_document(doc.get("initial"))
        a = _settings_pair(doc.get("a"), "a")
        b = _settings_pair(doc.get("b"), "b")
        c = _settings_pair(doc.get("c"), "c")
        unis = doc.get("unitaries")
        unitaries = (None, None)
        if unis is not None:
            if not isinstance(unis, list) or len(unis) != 2:
                raise serialize.SpecError("unitaries: expected a list of two entries")
            unitaries = tuple(
                serialize.unitary_from_document(u, f"unitaries[{i}]") for i, u in enumerate(unis)
            )
    else:
        initial = maximally_mixed(2)
        a, b, c = monogamy_preset_settings()
        unitaries = (None, None)
    result = monogamy_sum(initial, a, b, c, unitaries=unitaries, mode=mode)
    return serialize.document("monogamy", serialize.to_jsonable(result)), None, EXIT_OK


def _run_optimize(args, config: RunConfig):
    overrides = {"seed": config.seed}
    if args.restarts is not None:
        overrides["restarts"] = args.restarts
    if args.max_evals is not None:
        overrides["max_evals"] = args.max_evals
    result = optimize_settings(
        objective=args.objective, config=OptimizerConfig(**overrides), n=args.n
    )
    doc = serialize.document("optimize", serialize.to_jsonable(result))
    code = EXIT_OK if result.converged else EXIT_NONCONVERGED
    return doc, serialize.trace_csv(result), code


def _run_weight(args, config: RunConfig):
    doc = serialize.load_document(args.spec)
    history, bridging = serialize.history_from_document(doc)
    singletons = [normalize(HistoryState(((c, eh),))) for c, eh in history.terms]
    report = is_consistent_family(singletons, bridging, tol=config.tolerance)
    artifacts = {
        "weight": weight(history, bridging),
        "norm": hs_norm(history),
        "n_terms": history.n_terms,
        "term_consistency": report,
    }
    return serialize.document("weight", artifacts), None, EXIT_OK


def _run_abl(args, config: RunConfig):
    doc = serialize.load_document(args.spec)
    parsed = serialize.experiment_from_document(doc)
    artifacts: dict = {}
    if parsed["initial"] == "mixed":
        dist = mixed_sequence_distribution(
            maximally_mixed(2), parsed["slots"],
            unitaries=parsed["unitaries"], post=parsed["post"],
        )
        if args.slot is not None:
            raise serialize.SpecError("single-slot probability needs a pure 'pre' state")
    else:
        exp = TwoTimeExperiment.build(
            parsed["pre"], parsed["slots"], post=parsed["post"],
            unitaries=parsed["unitaries"],
        )
        dist = sequence_distribution(exp)
        if args.slot is not None:
            outcome = +1 if (args.outcome or "+") == "+" else -1
            artifacts["slot"] = args.slot
            artifacts["outcome"] = args.outcome or "+"
            artifacts["abl_probability"] = abl_probability(exp, args.slot, outcome)
    artifacts["distribution"] = dist
    return serialize.document("abl", artifacts), serialize.distribution_csv(dist), EXIT_OK


_HANDLERS = {
    "scenario": _run_scenario,
    "lgi": _run_lgi,
    "chained": _run_chained,
    "monogamy": _run_monogamy,
    "optimize": _run_optimize,
    "weight": _run_weight,
    "abl": _run_abl,
}


def _render(doc: dict, fmt: str, special_csv: str | None) -> str:
    if fmt == "json":
        return serialize.dumps_json(doc)
    if fmt == "csv":
        return special_csv if special_csv is not None else serialize.dumps_csv(doc)
    return serialize.dumps_pretty(doc)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig(
        command=args.command,
        input_path=getattr(args, "spec", None),
        output_format=args.format,
        tolerance=args.tol,
        seed=args.seed,
        out_path=args.out,
    )
    try:
        doc, special_csv, code = _HANDLERS[args.command](args, config)
    except serialize.SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ImpossiblePostselectionError as exc:
        print(f"error: impossible post-selection: {exc}", file=sys.stderr)
        return EXIT_IMPOSSIBLE
    except (ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT

    text = _render(doc, config.output_format, special_csv)
    if config.out_path is not None:
        with open(config.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
