"""Temporal Bell-type functionals for sequential measurements on one system.

The basic correlator pairs a dichotomic measurement at an earlier time with
one at a later time under nonselective (collapse) dynamics:

    E(A, B) = sum over a, b of a * b * Tr(P_b U P_a rho P_a U^dag P_b)

For the maximally mixed qubit and trivial evolution this reduces to the
closed form Tr(A B) / 2, so the four-term functional

    S = E(A1,B1) + E(A1,B2) + E(A2,B1) - E(A2,B2)

reaches 2*sqrt(2) at mutually unbiased optimal settings while every
deterministic assignment stays at or below 2.  Because consecutive pairs of
times are statistically interchangeable, two-pair sums reach 4*sqrt(2)
(beating the spatial two-pair cap of 4) and n-pair chains reach 2*sqrt(2)*n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ShapeError
from .linalg import as_matrix, identity, max_abs, maximally_mixed, pauli
from .twostate import MeasurementSetting, OutcomeDistribution, mixed_sequence_distribution

__all__ = [
    "CLASSICAL_BOUND",
    "TSIRELSON_BOUND",
    "CorrelatorSpec",
    "BellReport",
    "MonogamyResult",
    "ChainedResult",
    "OptimizerConfig",
    "OptimizeResult",
    "temporal_correlator",
    "s_lgi",
    "lgi_from_distributions",
    "classical_bound_bruteforce",
    "chained_classical_bound",
    "monogamy_sum",
    "chained_bell",
    "optimize_settings",
    "tsirelson_settings",
    "monogamy_preset_settings",
    "settings_from_angles",
]

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)

INDEPENDENT = "independent_ensembles"
CHAINED = "chained_single_system"
_MODES = (INDEPENDENT, CHAINED)


def _check_initial(initial) -> np.ndarray:
    rho = as_matrix(initial)
    d = rho.shape[0]
    if rho.shape != (d, d):
        raise ShapeError("initial state must be square")
    if abs(np.trace(rho) - 1.0) > 1e-9 or max_abs(rho - rho.conj().T) > 1e-9:
        raise ValueError("initial state must be a unit-trace Hermitian density operator")
    return rho


@dataclass(frozen=True)
class CorrelatorSpec:
    """Settings and dynamics for one two-time Bell functional."""

    initial: np.ndarray
    first_settings: tuple[MeasurementSetting, MeasurementSetting]
    second_settings: tuple[MeasurementSetting, MeasurementSetting]
    unitary: np.ndarray | None = None
    evaluation_mode: str = INDEPENDENT

    def __post_init__(self):
        rho = _check_initial(self.initial)
        rho.setflags(write=False)
        object.__setattr__(self, "initial", rho)
        if self.evaluation_mode not in _MODES:
            raise ValueError(f"evaluation_mode must be one of {_MODES}")
        u = self.unitary
        if u is None:
            u = identity(rho.shape[0])
        u = np.array(as_matrix(u), dtype=complex)
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)


@dataclass(frozen=True)
class BellReport:
    """Four correlators and the value of the two-time Bell functional."""

    correlators: np.ndarray
    value: float
    classical_bound: float
    quantum_bound: float
    settings_used: tuple[str, ...]
    mode: str

    def __post_init__(self):
        c = np.array(self.correlators, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "correlators", c)
        if c.shape != (2, 2):
            raise ShapeError("correlator table must be 2x2")
        if np.max(np.abs(c)) > 1.0 + 1e-9:
            raise ValueError("correlators must lie in [-1, 1]")
        expected = c[0, 0] + c[0, 1] + c[1, 0] - c[1, 1]
        if abs(self.value - expected) > 1e-12:
            raise ValueError("value does not match the correlator combination")


def temporal_correlator(
    initial, first: MeasurementSetting, unitary, second: MeasurementSetting
) -> float:
    """Two-time correlator under nonselective collapse at the first time."""
    rho = _check_initial(initial)
    u = identity(rho.shape[0]) if unitary is None else as_matrix(unitary)
    total = 0.0
    for a in (+1, -1):
        pa = first.projector(a)
        mid = u @ pa @ rho @ pa @ u.conj().T
        for b in (+1, -1):
            pb = second.projector(b)
            total += a * b * float(np.trace(pb @ mid).real)
    return total


def _correlator_table(rho, firsts, unitary, seconds) -> np.ndarray:
    table = np.empty((2, 2))
    for i, a_set in enumerate(firsts):
        for j, b_set in enumerate(seconds):
            table[i, j] = temporal_correlator(rho, a_set, unitary, b_set)
    return table


def s_lgi(spec: CorrelatorSpec) -> BellReport:
    """Evaluate S = c11 + c12 + c21 - c22 for the given settings."""
    table = _correlator_table(spec.initial, spec.first_settings, spec.unitary, spec.second_settings)
    value = float(table[0, 0] + table[0, 1] + table[1, 0] - table[1, 1])
    labels = tuple(s.label for s in spec.first_settings + spec.second_settings)
    return BellReport(table, value, CLASSICAL_BOUND, TSIRELSON_BOUND, labels, spec.evaluation_mode)


def lgi_from_distributions(dists: Mapping[tuple[str, str], OutcomeDistribution]) -> BellReport:
    """Assemble the functional from externally supplied joint distributions.

    ``dists`` maps setting-label pairs to two-slot distributions; the label
    grid must be complete (2 first-settings x 2 second-settings).
    """
    firsts = sorted({x for x, _ in dists})
    seconds = sorted({y for _, y in dists})
    if len(firsts) != 2 or len(seconds) != 2 or len(dists) != 4:
        raise ValueError("need distributions for exactly 2x2 setting pairs")
    table = np.empty((2, 2))
    for i, x in enumerate(firsts):
        for j, y in enumerate(seconds):
            if (x, y) not in dists:
                raise ValueError(f"missing distribution for setting pair {(x, y)}")
            table[i, j] = dists[(x, y)].correlator()
    value = float(table[0, 0] + table[0, 1] + table[1, 0] - table[1, 1])
    return BellReport(
        table, value, CLASSICAL_BOUND, TSIRELSON_BOUND, tuple(firsts + seconds), INDEPENDENT
    )


# ---------------------------------------------------------------------------
# classical comparators


def classical_bound_bruteforce(coefficients=((1, 1), (1, -1))) -> float:
    """Maximum of sum c_ij * a_i * b_j over deterministic +/-1 assignments."""
    coeff = np.asarray(coefficients, dtype=float)
    if coeff.shape != (2, 2):
        raise ShapeError("coefficient table must be 2x2")
    best = -math.inf
    for a1, a2, b1, b2 in itertools.product((1, -1), repeat=4):
        a = (a1, a2)
        b = (b1, b2)
        val = sum(coeff[i, j] * a[i] * b[j] for i in range(2) for j in range(2))
        best = max(best, val)
    return float(best)


def chained_classical_bound(n: int, coefficients=((1, 1), (1, -1))) -> float:
    """Deterministic maximum of an n-block chain sharing adjacent parties.

    Block i couples party i and party i+1 with the same 2x2 coefficient
    pattern; every party holds a +/-1 value per setting.  Enumeration is
    exhaustive over all 4^(n+1) strategies.
    """
    if n < 1:
        raise ValueError("need at least one block")
    coeff = np.asarray(coefficients, dtype=float)
    strategies = list(itertools.product((1, -1), repeat=2))
    best = -math.inf
    for assignment in itertools.product(range(4), repeat=n + 1):
        total = 0.0
        for k in range(n):
            a = strategies[assignment[k]]
            b = strategies[assignment[k + 1]]
            total += sum(coeff[i, j] * a[i] * b[j] for i in range(2) for j in range(2))
        best = max(best, total)
    return float(best)


# ---------------------------------------------------------------------------
# monogamy and chains


@dataclass(frozen=True)
class MonogamyResult:
    first_pair: BellReport
    second_pair: BellReport
    total: float
    quantum_reference: float
    spatial_reference: float
    mode: str


def _chained_second_pair_table(rho, a_settings, b_settings, c_settings, u1, u2) -> np.ndarray:
    """Second-pair correlators with the first measurement left in the chain.

    Each run measures the first observable (both of its settings weighted
    equally), keeps the collapsed state, and continues; the middle outcome is
    shared between the two pair functionals, so the later correlator is the
    abc-joint marginal over the first outcome.
    """
    table = np.zeros((2, 2))
    for j, b_set in enumerate(b_settings):
        for k, c_set in enumerate(c_settings):
            acc = 0.0
            for a_set in a_settings:
                dist = mixed_sequence_distribution(
                    rho,
                    (a_set, b_set, c_set),
                    unitaries=(identity(rho.shape[0]), u1, u2, identity(rho.shape[0])),
                )
                acc += dist.correlator(1, 2)
            table[j, k] = acc / len(a_settings)
    return table


def monogamy_sum(
    initial,
    a_settings: Sequence[MeasurementSetting],
    b_settings: Sequence[MeasurementSetting],
    c_settings: Sequence[MeasurementSetting],
    unitaries=(None, None),
    mode: str = INDEPENDENT,
) -> MonogamyResult:
    """Sum of the two overlapping pair functionals over three times.

    The middle-time settings are shared between both pairs.  In independent
    mode each pair is evaluated on a fresh ensemble; in chained mode the
    second pair is evaluated downstream of the first measurement in a single
    run (no established reference value applies to the chained reading).
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    rho = _check_initial(initial)
    d = rho.shape[0]
    u1 = identity(d) if unitaries[0] is None else as_matrix(unitaries[0])
    u2 = identity(d) if unitaries[1] is None else as_matrix(unitaries[1])
    a_settings, b_settings, c_settings = tuple(a_settings), tuple(b_settings), tuple(c_settings)

    first = s_lgi(CorrelatorSpec(rho, a_settings, b_settings, u1, mode))
    if mode == INDEPENDENT:
        second = s_lgi(CorrelatorSpec(rho, b_settings, c_settings, u2, mode))
    else:
        table = _chained_second_pair_table(rho, a_settings, b_settings, c_settings, u1, u2)
        value = float(table[0, 0] + table[0, 1] + table[1, 0] - table[1, 1])
        labels = tuple(s.label for s in b_settings + c_settings)
        second = BellReport(table, value, CLASSICAL_BOUND, TSIRELSON_BOUND, labels, mode)
    total = float(first.value + second.value)
    return MonogamyResult(first, second, total, 4.0 * math.sqrt(2.0), 4.0, mode)


@dataclass(frozen=True)
class ChainedResult:
    block_reports: tuple[BellReport, ...]
    total: float
    classical_bound: float
    quantum_bound: float


def chained_bell(
    n: int,
    first_settings: Sequence[MeasurementSetting],
    second_settings: Sequence[MeasurementSetting],
    initial=None,
    unitary=None,
) -> ChainedResult:
    """Chain of n two-time blocks, each evaluated on a fresh ensemble.

    The chain repeats one block (the loop reading of a two-time sequence), so
    all blocks share settings and the total is n times the block value; the
    classical comparator for the same functional is 2n.
    """
    if n < 1:
        raise ValueError("need at least one block")
    rho = maximally_mixed(2) if initial is None else _check_initial(initial)
    reports = tuple(
        s_lgi(CorrelatorSpec(rho, tuple(first_settings), tuple(second_settings), unitary, INDEPENDENT))
        for _ in range(n)
    )
    total = float(sum(r.value for r in reports))
    return ChainedResult(reports, total, 2.0 * n, TSIRELSON_BOUND * n)


# ---------------------------------------------------------------------------
# presets


def tsirelson_settings():
    """Settings saturating the two-time quantum bound 2*sqrt(2).

    First party measures Z and X; second measures the diagonal combinations.
    (Verified by the optimizer; kept exact here so downstream checks need no
    search.)
    """
    rt = math.sqrt(2.0)
    firsts = (MeasurementSetting.from_pauli("Z"), MeasurementSetting.from_pauli("X"))
    seconds = (
        MeasurementSetting("(Z+X)/sqrt2", (pauli("Z") + pauli("X")) / rt),
        MeasurementSetting("(Z-X)/sqrt2", (pauli("Z") - pauli("X")) / rt),
    )
    return firsts, seconds


def monogamy_preset_settings():
    """Three-time settings saturating both overlapping pair functionals."""
    firsts, seconds = tsirelson_settings()
    return firsts, seconds, firsts


# ---------------------------------------------------------------------------
# derivative-free optimizer over Bloch angles


@dataclass(frozen=True)
class OptimizerConfig:
    theta_points: int = 12
    phi_points: int = 24
    tol: float = 1e-10
    max_evals: int = 10_000
    seed: int = 0
    restarts: int = 2
    max_sweeps: int = 6


@dataclass(frozen=True)
class OptimizeResult:
    objective: str
    value: float
    angles: tuple[float, ...]
    settings: tuple[MeasurementSetting, ...]
    trace: tuple[tuple[int, tuple[float, ...], float], ...]
    converged: bool
    evaluations: int


def settings_from_angles(angles: Sequence[float]) -> tuple[MeasurementSetting, ...]:
    """Interpret a flat (theta, phi, theta, phi, ...) vector as settings."""
    if len(angles) % 2:
        raise ValueError("need an even number of angles")
    return tuple(
        MeasurementSetting.from_bloch(angles[2 * i], angles[2 * i + 1])
        for i in range(len(angles) // 2)
    )


def _objective_function(objective: str, initial, n: int) -> tuple[Callable, int]:
    rho = maximally_mixed(2) if initial is None else _check_initial(initial)
    if rho.shape != (2, 2):
        raise ShapeError("the angle parameterization covers qubit settings only")

    if objective == "s_lgi":
        def fn(angles):
            s = settings_from_angles(angles)
            return s_lgi(CorrelatorSpec(rho, (s[0], s[1]), (s[2], s[3]))).value
        return fn, 8
    if objective == "chained_bell":
        def fn(angles):
            s = settings_from_angles(angles)
            return chained_bell(n, (s[0], s[1]), (s[2], s[3]), rho).total
        return fn, 8
    if objective == "monogamy_sum":
        def fn(angles):
            s = settings_from_angles(angles)
            return monogamy_sum(rho, (s[0], s[1]), (s[2], s[3]), (s[4], s[5])).total
        return fn, 12
    raise ValueError(f"unknown objective {objective!r}")


def optimize_settings(
    objective: str = "s_lgi",
    initial=None,
    config: OptimizerConfig = OptimizerConfig(),
    n: int = 1,
) -> OptimizeResult:
    """Maximize a Bell-type functional over Bloch-angle settings.

    Two stages: iterated coordinate sweeps on a coarse angle grid, then a
    Nelder-Mead refinement from the best grid point.  Fully deterministic for
    a given config seed.  If the evaluation budget runs out before the
    refinement reaches tolerance the best-effort result is flagged
    non-converged.
    """
    from scipy.optimize import minimize

    fn, n_angles = _objective_function(objective, initial, n)
    evals = 0
    trace: list[tuple[int, tuple[float, ...], float]] = []
    budget = config.max_evals

    def tracked(angles) -> float:
        nonlocal evals
        evals += 1
        return fn(angles)

    theta_grid = np.linspace(0.0, math.pi, config.theta_points)
    phi_grid = np.linspace(0.0, 2.0 * math.pi, config.phi_points, endpoint=False)
    rng = np.random.default_rng(config.seed)
    starts = [np.full(n_angles, math.pi / 4.0)]
    for _ in range(config.restarts):
        start = np.empty(n_angles)
        start[0::2] = rng.uniform(0.0, math.pi, n_angles // 2)
        start[1::2] = rng.uniform(0.0, 2.0 * math.pi, n_angles // 2)
        starts.append(start)

    best_angles, best_val = None, -math.inf
    for start in starts:
        angles = start.copy()
        val = tracked(angles)
        for _ in range(config.max_sweeps):
            improved = False
            for i in range(n_angles):
                grid = theta_grid if i % 2 == 0 else phi_grid
                for candidate in grid:
                    if evals >= budget:
                        break
                    trial = angles.copy()
                    trial[i] = candidate
                    tv = tracked(trial)
                    if tv > val + 1e-13:
                        angles, val, improved = trial, tv, True
            if not improved or evals >= budget:
                break
        if val > best_val:
            best_angles, best_val = angles, val
            trace.append((evals, tuple(float(a) for a in angles), float(val)))

    remaining = max(budget - evals, 0)
    converged = False
    if remaining > n_angles + 1:
        res = minimize(
            lambda x: -tracked(x),
            best_angles,
            method="Nelder-Mead",
            options={
                "xatol": config.tol,
                "fatol": config.tol,
                "maxfev": remaining,
                "maxiter": remaining,
            },
        )
        if -res.fun > best_val:
            best_angles, best_val = res.x, -res.fun
        converged = bool(res.success)
        trace.append((evals, tuple(float(a) for a in best_angles), float(best_val)))

    return OptimizeResult(
        objective=objective,
        value=float(best_val),
        angles=tuple(float(a) for a in best_angles),
        settings=settings_from_angles(best_angles),
        trace=tuple(trace),
        converged=converged,
        evaluations=evals,
    )
