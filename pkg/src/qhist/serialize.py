"""JSON documents, CSV tables, and spec-file parsing.

Output side: ``to_jsonable`` turns any result object from this package into
plain JSON types.  Complex scalars and matrices are encoded as nested arrays
of ``[re, im]`` pairs; quantities that are real by construction
(probabilities, correlators, bounds) stay plain floats.  ``document`` wraps
everything in the uniform top-level shape {name, artifacts, notes}.

Input side: small parsers for the human-writable spec files the command line
accepts.  States may be named ("0", "1", "+", "-", "i+", "i-") or explicit
[re, im] vectors; measurement settings may be named Paulis ("X", "Y", "Z")
or Bloch angles {"theta": t, "phi": p}; unitaries may be named
("I", "H", "X", "Y", "Z") or explicit matrices.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Mapping

import numpy as np

from .bell import BellReport, ChainedResult, MonogamyResult, OptimizeResult
from .errors import ShapeError
from .histories import (
    BridgingSet,
    ConsistencyReport,
    ElementaryHistory,
    HistoryState,
    MixedHistory,
    ReductionSearchResult,
    SubsystemReduction,
    TimeGrid,
)
from .linalg import identity, pauli, qubit_ket
from .scenarios import ScenarioResult
from .twostate import MarginalReport, MeasurementSetting, OutcomeDistribution

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)

NAMED_UNITARIES = {
    "I": identity(2),
    "H": _HADAMARD,
    "X": pauli("X"),
    "Y": pauli("Y"),
    "Z": pauli("Z"),
}

# named rank-one projector slots, keyed by axis and sign
NAMED_PROJECTOR_KETS = {
    "z+": "0",
    "z-": "1",
    "x+": "+",
    "x-": "-",
    "y+": "i+",
    "y-": "i-",
}


# ---------------------------------------------------------------------------
# encoding


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_document(m: np.ndarray) -> list:
    """Nested [re, im] pairs for a vector or matrix."""
    a = np.asarray(m)
    if a.ndim == 1:
        return [complex_pair(z) for z in a]
    if a.ndim == 2:
        return [[complex_pair(z) for z in row] for row in a]
    raise ShapeError(f"cannot encode array of rank {a.ndim}")


def _grid_doc(grid: TimeGrid) -> dict:
    return {"labels": list(grid.labels), "slot_dims": list(grid.slot_dims)}


def to_jsonable(obj):
    """Recursively convert package objects to plain JSON-compatible types."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return float(obj)
    if isinstance(obj, complex):
        return complex_pair(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.complexfloating):
        return complex_pair(obj)
    if isinstance(obj, np.ndarray):
        return matrix_document(obj)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}

    if isinstance(obj, TimeGrid):
        return _grid_doc(obj)
    if isinstance(obj, ElementaryHistory):
        return {"slots": [matrix_document(s) for s in obj.slots]}
    if isinstance(obj, HistoryState):
        return {
            "grid": _grid_doc(obj.grid),
            "terms": [
                {"coefficient": complex_pair(c), "slots": [matrix_document(s) for s in eh.slots]}
                for c, eh in obj.terms
            ],
        }
    if isinstance(obj, BridgingSet):
        return {
            "grid": _grid_doc(obj.grid),
            "unitaries": [matrix_document(u) for u in obj.unitaries],
        }
    if isinstance(obj, MixedHistory):
        return {
            "ensemble": [
                {"probability": float(p), "state": to_jsonable(h)} for p, h in obj.ensemble
            ]
        }
    if isinstance(obj, ConsistencyReport):
        return {
            "consistent": bool(obj.consistent),
            "max_offdiagonal": float(obj.max_offdiagonal),
            "tol": float(obj.tol),
            "matrix": matrix_document(obj.matrix),
        }
    if isinstance(obj, SubsystemReduction):
        return {
            "state": to_jsonable(obj.state),
            "bridging": to_jsonable(obj.bridging),
            "consistency": to_jsonable(obj.consistency),
        }
    if isinstance(obj, ReductionSearchResult):
        return {
            "best_overlap": float(obj.best_overlap),
            "upper_bound": float(obj.upper_bound),
            "coefficients": [complex_pair(c) for c in obj.coefficients],
            "evaluations": int(obj.evaluations),
        }
    if isinstance(obj, MeasurementSetting):
        return {"label": obj.label, "observable": matrix_document(obj.observable)}
    if isinstance(obj, OutcomeDistribution):
        return {
            "settings": list(obj.settings),
            "table": {k: float(v) for k, v in sorted(obj.table.items())},
        }
    if isinstance(obj, MarginalReport):
        return {
            "earlier_deviation": float(obj.earlier_deviation),
            "later_deviation": float(obj.later_deviation),
            "tol": float(obj.tol),
            "flagged": bool(obj.flagged),
        }
    if isinstance(obj, BellReport):
        return {
            "correlators": [[float(x) for x in row] for row in obj.correlators],
            "value": float(obj.value),
            "classical_bound": float(obj.classical_bound),
            "quantum_bound": float(obj.quantum_bound),
            "settings_used": list(obj.settings_used),
            "mode": obj.mode,
        }
    if isinstance(obj, MonogamyResult):
        return {
            "first_pair": to_jsonable(obj.first_pair),
            "second_pair": to_jsonable(obj.second_pair),
            "total": float(obj.total),
            "quantum_reference": float(obj.quantum_reference),
            "spatial_reference": float(obj.spatial_reference),
            "mode": obj.mode,
        }
    if isinstance(obj, ChainedResult):
        return {
            "block_reports": [to_jsonable(r) for r in obj.block_reports],
            "total": float(obj.total),
            "classical_bound": float(obj.classical_bound),
            "quantum_bound": float(obj.quantum_bound),
        }
    if isinstance(obj, OptimizeResult):
        return {
            "objective": obj.objective,
            "value": float(obj.value),
            "angles": [float(a) for a in obj.angles],
            "settings": [to_jsonable(s) for s in obj.settings],
            "trace": [
                {"evaluation": int(n), "angles": [float(a) for a in ang], "value": float(v)}
                for n, ang, v in obj.trace
            ],
            "converged": bool(obj.converged),
            "evaluations": int(obj.evaluations),
        }
    if isinstance(obj, ScenarioResult):
        return document(obj.name, obj.artifacts, obj.notes)
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def document(name: str, artifacts: Mapping, notes=()) -> dict:
    """Uniform top-level report shape used by every command."""
    return {
        "name": name,
        "artifacts": {str(k): to_jsonable(v) for k, v in artifacts.items()},
        "notes": [str(n) for n in notes],
    }


def scenario_document(result: ScenarioResult) -> dict:
    return document(result.name, result.artifacts, result.notes)


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# CSV


def format_number(x: float) -> str:
    return f"{float(x):.12g}"


def _flat_items(node, prefix=""):
    if isinstance(node, dict):
        for k in sorted(node):
            yield from _flat_items(node[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(node, list):
        for i, v in enumerate(node):
            yield from _flat_items(v, f"{prefix}[{i}]")
    elif isinstance(node, bool):
        yield prefix, "true" if node else "false"
    elif isinstance(node, (int, float)):
        yield prefix, format_number(node)
    elif node is None:
        yield prefix, ""
    else:
        yield prefix, str(node)


def dumps_csv(doc: dict) -> str:
    """Flatten a JSON document into RFC-4180 key,value rows."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["key", "value"])
    for key, value in _flat_items(doc):
        writer.writerow([key, value])
    return buf.getvalue()


def distribution_csv(dist: OutcomeDistribution) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["outcome", "probability"])
    for outcome in sorted(dist.table):
        writer.writerow([outcome, format_number(dist.table[outcome])])
    return buf.getvalue()


def trace_csv(result: OptimizeResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    n_pairs = len(result.angles) // 2
    header = ["evaluation"]
    for i in range(n_pairs):
        header += [f"theta_{i}", f"phi_{i}"]
    header.append("value")
    writer.writerow(header)
    for neval, angles, value in result.trace:
        writer.writerow([neval, *[format_number(a) for a in angles], format_number(value)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# pretty text


def dumps_pretty(doc: dict) -> str:
    lines = [doc.get("name", "report")]
    items = list(_flat_items(doc.get("artifacts", {})))
    width = max((len(k) for k, _ in items), default=0)
    for key, value in items:
        lines.append(f"  {key:<{width}}  {value}")
    notes = doc.get("notes", [])
    if notes:
        lines.append("")
        for note in notes:
            lines.append(f"  note: {note}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# spec-file parsing


class SpecError(ValueError):
    """Unreadable or semantically invalid spec file."""


def load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: top level must be an object")
    return doc


def _pairs_to_array(doc, what: str) -> np.ndarray:
    try:
        a = np.asarray(doc, dtype=float)
    except (TypeError, ValueError):
        raise SpecError(f"{what}: expected nested [re, im] pairs") from None
    if a.ndim < 2 or a.shape[-1] != 2:
        raise SpecError(f"{what}: expected nested [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def state_from_document(doc, what: str = "state") -> np.ndarray:
    """A ket from a named single-qubit state or a [re, im] vector."""
    if isinstance(doc, str):
        try:
            return qubit_ket(doc)
        except (KeyError, ValueError):
            raise SpecError(f"{what}: unknown named state {doc!r}") from None
    vec = _pairs_to_array(doc, what)
    if vec.ndim != 1:
        raise SpecError(f"{what}: expected a vector")
    return vec


def matrix_from_document(doc, what: str = "matrix") -> np.ndarray:
    mat = _pairs_to_array(doc, what)
    if mat.ndim != 2:
        raise SpecError(f"{what}: expected a matrix")
    return mat


def unitary_from_document(doc, what: str = "unitary") -> np.ndarray:
    if isinstance(doc, str):
        try:
            return NAMED_UNITARIES[doc.upper()]
        except KeyError:
            known = ", ".join(sorted(NAMED_UNITARIES))
            raise SpecError(f"{what}: unknown named unitary {doc!r} (known: {known})") from None
    return matrix_from_document(doc, what)


def setting_from_document(doc, what: str = "setting") -> MeasurementSetting:
    if isinstance(doc, str):
        name = doc.upper()
        if name in ("X", "Y", "Z"):
            return MeasurementSetting.from_pauli(name)
        raise SpecError(f"{what}: unknown named setting {doc!r} (use X, Y, Z or Bloch angles)")
    if isinstance(doc, dict):
        try:
            theta, phi = float(doc["theta"]), float(doc["phi"])
        except (KeyError, TypeError, ValueError):
            raise SpecError(f"{what}: Bloch form needs numeric 'theta' and 'phi'") from None
        return MeasurementSetting.from_bloch(theta, phi, label=doc.get("label"))
    raise SpecError(f"{what}: expected a Pauli name or Bloch angles")


def slot_operator_from_document(doc, what: str = "slot") -> np.ndarray:
    """A slot operator: named projector ("z+", "x-", ...), "I", or a matrix."""
    if isinstance(doc, str):
        if doc == "I":
            return identity(2)
        key = doc.lower()
        if key in NAMED_PROJECTOR_KETS:
            ket = qubit_ket(NAMED_PROJECTOR_KETS[key])
            return np.outer(ket, ket.conj())
        known = ", ".join(sorted(NAMED_PROJECTOR_KETS))
        raise SpecError(f"{what}: unknown named slot {doc!r} (known: I, {known})")
    return matrix_from_document(doc, what)


def history_from_document(doc: dict, what: str = "history") -> tuple[HistoryState, BridgingSet]:
    """HistoryState plus bridging from a weight-command spec document."""
    hdoc = doc.get("history", doc)
    grid_doc = hdoc.get("grid")
    terms_doc = hdoc.get("terms")
    if not isinstance(terms_doc, list) or not terms_doc:
        raise SpecError(f"{what}: 'terms' must be a nonempty list")

    first_slots = terms_doc[0].get("slots") if isinstance(terms_doc[0], dict) else None
    if not isinstance(first_slots, list) or not first_slots:
        raise SpecError(f"{what}: each term needs a nonempty 'slots' list")

    if grid_doc is None:
        n = len(first_slots)
        ops0 = [slot_operator_from_document(s, f"{what}: term 0 slot {i}") for i, s in enumerate(first_slots)]
        grid = TimeGrid(tuple(float(i) for i in range(n)), tuple(op.shape[0] for op in ops0))
    else:
        try:
            grid = TimeGrid(tuple(float(x) for x in grid_doc["labels"]),
                            tuple(int(d) for d in grid_doc["slot_dims"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"{what}: bad grid ({exc})") from None

    terms = []
    for i, tdoc in enumerate(terms_doc):
        if not isinstance(tdoc, dict):
            raise SpecError(f"{what}: term {i} must be an object")
        cdoc = tdoc.get("coefficient", [1.0, 0.0])
        if not (isinstance(cdoc, list) and len(cdoc) == 2):
            raise SpecError(f"{what}: term {i} coefficient must be a [re, im] pair")
        coef = complex(float(cdoc[0]), float(cdoc[1]))
        slots = [
            slot_operator_from_document(s, f"{what}: term {i} slot {j}")
            for j, s in enumerate(tdoc.get("slots", []))
        ]
        if len(slots) != grid.n_slots:
            raise SpecError(f"{what}: term {i} has {len(slots)} slots, grid has {grid.n_slots}")
        state = HistoryState.from_slots(grid, slots, coefficient=coef)
        terms.append(state)
    history = terms[0]
    for t in terms[1:]:
        history = history + t

    bdoc = doc.get("bridging")
    if bdoc is None:
        bridging = BridgingSet.trivial(grid)
    else:
        unis = bdoc.get("unitaries") if isinstance(bdoc, dict) else bdoc
        if not isinstance(unis, list) or len(unis) != grid.n_slots - 1:
            raise SpecError(f"{what}: bridging needs {grid.n_slots - 1} unitaries")
        bridging = BridgingSet(
            grid, tuple(unitary_from_document(u, f"{what}: bridge {i}") for i, u in enumerate(unis))
        )
    return history, bridging


def experiment_from_document(doc: dict) -> dict:
    """Parsed pieces of a two-state experiment spec.

    Returns a dict with keys pre (ket or None), initial ("mixed" or None),
    post (ket or None), slots (tuple of MeasurementSetting or None), and
    unitaries (tuple of matrices or None).
    """
    out: dict = {"pre": None, "initial": None, "post": None}
    if doc.get("initial") == "mixed":
        out["initial"] = "mixed"
    elif "pre" in doc:
        out["pre"] = state_from_document(doc["pre"], "pre")
    else:
        raise SpecError("experiment: needs 'pre' (a state) or 'initial': \"mixed\"")
    if doc.get("post") is not None:
        out["post"] = state_from_document(doc["post"], "post")

    slots_doc = doc.get("slots")
    if not isinstance(slots_doc, list) or not slots_doc:
        raise SpecError("experiment: 'slots' must be a nonempty list")
    slots = tuple(
        None if s is None else setting_from_document(s, f"slot {i}")
        for i, s in enumerate(slots_doc)
    )
    out["slots"] = slots

    unis_doc = doc.get("unitaries")
    if unis_doc is None:
        out["unitaries"] = None
    else:
        if not isinstance(unis_doc, list) or len(unis_doc) != len(slots) + 1:
            raise SpecError(f"experiment: 'unitaries' must list {len(slots) + 1} entries")
        out["unitaries"] = tuple(
            unitary_from_document(u, f"unitary {i}") for i, u in enumerate(unis_doc)
        )
    return out
