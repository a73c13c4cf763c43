"""Pre/post-selected measurement sequences and their probability rules.

A two-time experiment fixes a pre-selected ket, an optional post-selected ket,
an ordered row of intermediate measurement slots (dichotomic observables or
None for unmeasured), and one interval unitary per gap, including the gaps
before the first slot and after the last.  Probabilities come in two distinct
semantics that this module keeps separate on purpose:

* amplitude chains (pre/post-conditioned, interference between slots), and
* sequential collapse chains on density operators (nonselective updates).

Outcome strings are '+'/'-' characters ordered earliest-first.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ImpossiblePostselectionError, ShapeError
from .histories import (
    BridgingSet,
    HistoryState,
    TimeGrid,
    chain_operator_sum,
    hs_norm,
)
from .linalg import as_ket, as_matrix, identity, max_abs, pauli, projector

__all__ = [
    "MeasurementSetting",
    "TwoTimeExperiment",
    "OutcomeDistribution",
    "MarginalReport",
    "abl_probability",
    "sequence_distribution",
    "mixed_sequence_distribution",
    "coherent_bundle_weights",
    "coherent_bundle_distribution",
    "coherent_bundle_probability",
    "history_bundle",
    "marginal_independence_check",
]

ZERO_WEIGHT_TOL = 1e-15

OUTCOME_CHARS = {+1: "+", -1: "-"}


@dataclass(frozen=True)
class MeasurementSetting:
    """A labeled dichotomic observable with eigenvalues +1 and -1."""

    label: str
    observable: np.ndarray

    def __post_init__(self):
        obs = np.array(as_matrix(self.observable), dtype=complex)
        obs.setflags(write=False)
        object.__setattr__(self, "observable", obs)
        d = obs.shape[0]
        if obs.shape != (d, d):
            raise ShapeError("observable must be square")
        if max_abs(obs - obs.conj().T) > 1e-9:
            raise ValueError(f"observable {self.label!r} is not Hermitian")
        if max_abs(obs @ obs - identity(d)) > 1e-9:
            raise ValueError(f"observable {self.label!r} is not dichotomic (O^2 != I)")
        p_plus, p_minus = self.projectors()
        if max_abs(p_plus + p_minus - identity(d)) > 1e-12:
            raise ValueError("outcome projectors do not resolve the identity")
        if max_abs(p_plus @ p_minus) > 1e-12:
            raise ValueError("outcome projectors are not orthogonal")

    @property
    def dim(self) -> int:
        return self.observable.shape[0]

    def projector(self, outcome: int) -> np.ndarray:
        if outcome not in (+1, -1):
            raise ValueError("outcome must be +1 or -1")
        return (identity(self.dim) + outcome * self.observable) / 2.0

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        return self.projector(+1), self.projector(-1)

    @classmethod
    def from_pauli(cls, name: str) -> "MeasurementSetting":
        return cls(name.upper(), pauli(name))

    @classmethod
    def from_bloch(cls, theta: float, phi: float, label: str | None = None) -> "MeasurementSetting":
        obs = (
            math.sin(theta) * math.cos(phi) * pauli("X")
            + math.sin(theta) * math.sin(phi) * pauli("Y")
            + math.cos(theta) * pauli("Z")
        )
        if label is None:
            label = f"bloch({theta:.6g},{phi:.6g})"
        return cls(label, obs)


@dataclass(frozen=True)
class TwoTimeExperiment:
    """Pre-selected ket, optional post-selection, slots, interval unitaries."""

    pre: np.ndarray
    post: Optional[np.ndarray]
    slots: tuple[Optional[MeasurementSetting], ...]
    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        pre = as_ket(self.pre, normalized=True)
        pre.setflags(write=False)
        object.__setattr__(self, "pre", pre)
        post = self.post
        if post is not None:
            post = as_ket(post, normalized=True)
            post.setflags(write=False)
        object.__setattr__(self, "post", post)
        slots = tuple(self.slots)
        object.__setattr__(self, "slots", slots)
        d = pre.size
        for s in slots:
            if s is not None and s.dim != d:
                raise ShapeError("slot observable dimension does not match the pre ket")
        if post is not None and post.size != d:
            raise ShapeError("post ket dimension does not match the pre ket")
        us = self.unitaries
        if us is None:
            us = tuple(identity(d) for _ in range(len(slots) + 1))
        us = tuple(np.array(as_matrix(u), dtype=complex) for u in us)
        for u in us:
            u.setflags(write=False)
        if len(us) != len(slots) + 1:
            raise ShapeError("need one interval unitary per gap, boundaries included")
        for u in us:
            if u.shape != (d, d):
                raise ShapeError("interval unitary has wrong dimension")
            if max_abs(u.conj().T @ u - identity(d)) > 1e-9:
                raise ValueError("interval operator is not unitary")
        object.__setattr__(self, "unitaries", us)

    @classmethod
    def build(cls, pre, slots, post=None, unitaries=None) -> "TwoTimeExperiment":
        slots = tuple(slots)
        pre = as_ket(pre)
        if unitaries is None:
            unitaries = tuple(identity(pre.size) for _ in range(len(slots) + 1))
        return cls(pre, post, slots, tuple(unitaries))

    @property
    def dim(self) -> int:
        return self.pre.size

    @property
    def measured_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.slots) if s is not None)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities for outcome strings of an ordered measurement row."""

    settings: tuple[str, ...]
    table: Mapping[str, float]

    def __post_init__(self):
        table = dict(self.table)
        object.__setattr__(self, "table", table)
        if not table:
            raise ValueError("distribution must have at least one outcome")
        if any(len(k) != len(self.settings) for k in table):
            raise ValueError("outcome strings must have one character per setting")
        if any(p < -1e-12 for p in table.values()):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(table.values()) - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")

    def probability(self, outcome: str) -> float:
        return self.table.get(outcome, 0.0)

    def marginal(self, position: int) -> dict[str, float]:
        out = {"+": 0.0, "-": 0.0}
        for string, p in self.table.items():
            out[string[position]] += p
        return out

    def correlator(self, i: int = 0, j: int = 1) -> float:
        total = 0.0
        for string, p in self.table.items():
            a = +1 if string[i] == "+" else -1
            b = +1 if string[j] == "+" else -1
            total += a * b * p
        return total


def _outcome_strings(n: int):
    return ("".join(bits) for bits in itertools.product("+-", repeat=n))


def _normalized(table: dict[str, float], labels: tuple[str, ...]) -> OutcomeDistribution:
    total = sum(table.values())
    if total <= ZERO_WEIGHT_TOL:
        raise ImpossiblePostselectionError("total weight is zero; conditional probabilities undefined")
    return OutcomeDistribution(labels, {k: v / total for k, v in table.items()})


def sequence_distribution(exp: TwoTimeExperiment) -> OutcomeDistribution:
    """Amplitude-chain distribution over outcome strings of the measured slots.

    With a post-selection the weight of a string is the squared modulus of the
    bra-projector-chain-ket amplitude; without one it is the squared norm of
    the collapsed vector, which equals the complete sum over any final basis.
    """
    measured = exp.measured_indices
    if not measured:
        raise ValueError("at least one measured slot is required")
    labels = tuple(exp.slots[i].label for i in measured)
    table: dict[str, float] = {}
    for string in _outcome_strings(len(measured)):
        signs = iter(+1 if ch == "+" else -1 for ch in string)
        vec = exp.pre
        for k, setting in enumerate(exp.slots):
            vec = exp.unitaries[k] @ vec
            if setting is not None:
                vec = setting.projector(next(signs)) @ vec
        vec = exp.unitaries[-1] @ vec
        if exp.post is None:
            w = float(np.vdot(vec, vec).real)
        else:
            w = abs(np.vdot(exp.post, vec)) ** 2
        table[string] = w
    return _normalized(table, labels)


def mixed_sequence_distribution(
    rho0,
    slots: Sequence[Optional[MeasurementSetting]],
    unitaries: Sequence | None = None,
    post=None,
) -> OutcomeDistribution:
    """Sequential-collapse distribution starting from a density operator."""
    rho0 = as_matrix(rho0)
    d = rho0.shape[0]
    if rho0.shape != (d, d):
        raise ShapeError("initial state must be a square density operator")
    if abs(np.trace(rho0) - 1.0) > 1e-9:
        raise ValueError("initial density operator must have unit trace")
    slots = tuple(slots)
    if unitaries is None:
        unitaries = tuple(identity(d) for _ in range(len(slots) + 1))
    unitaries = tuple(as_matrix(u) for u in unitaries)
    if len(unitaries) != len(slots) + 1:
        raise ShapeError("need one interval unitary per gap, boundaries included")
    measured = tuple(i for i, s in enumerate(slots) if s is not None)
    if not measured:
        raise ValueError("at least one measured slot is required")
    labels = tuple(slots[i].label for i in measured)
    post_proj = None if post is None else projector(as_ket(post, normalized=True))
    table: dict[str, float] = {}
    for string in _outcome_strings(len(measured)):
        signs = iter(+1 if ch == "+" else -1 for ch in string)
        chain = identity(d)
        for k, setting in enumerate(slots):
            chain = unitaries[k] @ chain
            if setting is not None:
                chain = setting.projector(next(signs)) @ chain
        chain = unitaries[-1] @ chain
        evolved = chain @ rho0 @ chain.conj().T
        if post_proj is None:
            w = float(np.trace(evolved).real)
        else:
            w = float(np.trace(post_proj @ evolved).real)
        table[string] = max(w, 0.0)
    return _normalized(table, labels)


def abl_probability(exp: TwoTimeExperiment, slot: int, outcome: int) -> float:
    """Pre/post-conditioned probability for a single intermediate measurement.

    Requires a post-selection and exactly one measured slot.  A vanishing
    normalizer means the post-selection is unreachable, which is an error
    rather than a 0/0.
    """
    if exp.post is None:
        raise ValueError("a post-selection is required")
    if exp.measured_indices != (slot,):
        raise ValueError("exactly one measured slot, matching `slot`, is required")
    dist = sequence_distribution(exp)
    return dist.probability(OUTCOME_CHARS[outcome])


# ---------------------------------------------------------------------------
# history bundles


def history_bundle(exp: TwoTimeExperiment):
    """Histories realizable in the experiment, one per nonzero outcome string.

    Each history brackets the outcome projectors between the pre and post
    boundary projectors (identity when a slot is unmeasured or the
    post-selection is absent) under the experiment's interval unitaries.
    Returned as tuples (outcome string, normalized history, probability);
    the probabilities match ``sequence_distribution`` and, equivalently, the
    normalized chain weights of the returned histories.
    """
    dist = sequence_distribution(exp)
    d = exp.dim
    n_slots = len(exp.slots) + 2
    grid = TimeGrid.regular(n_slots, d)
    bridging = BridgingSet(grid, exp.unitaries)
    post_op = identity(d) if exp.post is None else projector(exp.post)
    measured = exp.measured_indices
    bundle = []
    for string, p in dist.table.items():
        if p <= ZERO_WEIGHT_TOL:
            continue
        signs = dict(zip(measured, (+1 if ch == "+" else -1 for ch in string)))
        ops = [projector(exp.pre)]
        for k, setting in enumerate(exp.slots):
            ops.append(identity(d) if setting is None else setting.projector(signs[k]))
        ops.append(post_op)
        state = HistoryState.from_slots(grid, ops)
        bundle.append((string, (1.0 / hs_norm(state)) * state, p, bridging))
    return tuple(bundle)


# ---------------------------------------------------------------------------
# coherent bundle weights


def coherent_bundle_weights(
    h: HistoryState, b: BridgingSet, measured: Mapping[int, MeasurementSetting]
) -> dict[str, float]:
    """Raw coherent weights |Tr K|^2 after inserting outcome projectors.

    For each outcome string the measured slots of every term of the
    (normalized) history are replaced by the corresponding outcome projectors
    and the branch amplitudes are summed coherently through the chain
    operator; the closed-loop amplitude is its trace.  These weights need not
    sum to one: interference between branches is retained, which is exactly
    how this assignment differs from sequential collapse.
    """
    if abs(hs_norm(h) - 1.0) > 1e-9:
        raise ValueError("history must be normalized")
    positions = sorted(int(k) for k in measured)
    if not positions:
        raise ValueError("at least one measured slot is required")
    if positions[0] < 0 or positions[-1] >= h.grid.n_slots:
        raise ValueError("measured slot index out of range")
    weights: dict[str, float] = {}
    for string in _outcome_strings(len(positions)):
        signs = dict(zip(positions, (+1 if ch == "+" else -1 for ch in string)))
        terms = []
        for c, eh in h.terms:
            modified = eh
            for pos in positions:
                modified = modified.with_slot(pos, measured[pos].projector(signs[pos]))
            terms.append((c, modified))
        k = chain_operator_sum(HistoryState(tuple(terms)), b)
        weights[string] = abs(np.trace(k)) ** 2
    return weights


def coherent_bundle_distribution(
    h: HistoryState, b: BridgingSet, measured: Mapping[int, MeasurementSetting]
) -> OutcomeDistribution:
    weights = coherent_bundle_weights(h, b, measured)
    labels = tuple(measured[k].label for k in sorted(measured))
    return _normalized(weights, labels)


def coherent_bundle_probability(
    h: HistoryState, b: BridgingSet, measured: Mapping[int, MeasurementSetting], outcome: str
) -> float:
    return coherent_bundle_distribution(h, b, measured).probability(outcome)


# ---------------------------------------------------------------------------
# marginal checks


@dataclass(frozen=True)
class MarginalReport:
    """Setting-dependence of marginals in a family of two-slot distributions.

    ``earlier_deviation`` is the largest change of an earlier-slot marginal
    under a change of the later setting; a nonzero value here is flagged.
    ``later_deviation`` is the time-reversed quantity, which post-selected
    experiments may legitimately leave nonzero, so it is reported unflagged.
    """

    earlier_deviation: float
    later_deviation: float
    tol: float
    flagged: bool


def marginal_independence_check(
    dist_family: Mapping[tuple[str, str], OutcomeDistribution], tol: float = 1e-9
) -> MarginalReport:
    pairs = dict(dist_family)
    if not pairs:
        raise ValueError("need at least one setting pair")
    earlier = 0.0
    later = 0.0
    firsts = sorted({x for x, _ in pairs})
    seconds = sorted({y for _, y in pairs})
    for x in firsts:
        dists = [pairs[(x, y)] for y in seconds if (x, y) in pairs]
        for a in "+-":
            vals = [d.marginal(0)[a] for d in dists]
            if vals:
                earlier = max(earlier, max(vals) - min(vals))
    for y in seconds:
        dists = [pairs[(x, y)] for x in firsts if (x, y) in pairs]
        for bchar in "+-":
            vals = [d.marginal(1)[bchar] for d in dists]
            if vals:
                later = max(later, max(vals) - min(vals))
    return MarginalReport(earlier, later, tol, earlier > tol)
