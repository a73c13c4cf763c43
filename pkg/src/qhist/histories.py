"""History states on discrete time grids.

An elementary history assigns one operator per time slot, stored
earliest-first.  Superpositions of elementary histories carry complex
coefficients and live in the tensor product of per-slot operator spaces,
where the slot-wise Hilbert-Schmidt pairing

    <A, B> = Tr(A^dag B),   <h, g> = sum over term pairs of the product
                            of per-slot pairings

makes them an inner-product space.  Normalized history states have unit
Hilbert-Schmidt norm; constructors accept arbitrary scale and callers
normalize where a probabilistic reading is needed.

Unitary bridging operators connect adjacent slots.  The chain operator of an
elementary history with slots (P_0, ..., P_n) and bridges T_k = T(t_{k+1}, t_k)
is the time-ordered product

    K = P_n T_{n-1} P_{n-1} ... P_1 T_0 P_0

with the latest slot leftmost.  Weights are Tr(K^dag K); the pairwise
decoherence functional Tr(K_i^dag K_j) defines family consistency.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateHistoryError,
    GridMismatchError,
    NonFactorizableEvolutionError,
    ShapeError,
)
from .linalg import as_matrix, identity, max_abs, partial_trace, projector

__all__ = [
    "TimeGrid",
    "ElementaryHistory",
    "HistoryState",
    "BridgingSet",
    "MixedHistory",
    "ConsistencyReport",
    "SubsystemReduction",
    "chain_operator",
    "chain_operator_sum",
    "weight",
    "hs_inner",
    "hs_norm",
    "normalize",
    "decoherence_functional",
    "is_consistent_family",
    "temporal_partial_trace",
    "subsystem_trace_out",
    "mix",
    "purity",
    "history_vector",
    "mixed_history_density",
    "mixed_overlap",
    "exhaustive_projector_family",
    "best_joint_bell_reduction_overlap",
]

MERGE_TOL = 1e-12
UNITARITY_TOL = 1e-9


def _frozen(m) -> np.ndarray:
    out = np.array(as_matrix(m), dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeGrid:
    """Ordered time labels with one Hilbert-space dimension per slot."""

    labels: tuple[float, ...]
    slot_dims: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(float(t) for t in self.labels)
        dims = tuple(int(d) for d in self.slot_dims)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "slot_dims", dims)
        if len(labels) < 1:
            raise ValueError("a time grid needs at least one slot")
        if len(labels) != len(dims):
            raise ValueError("labels and slot_dims must have equal length")
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise ValueError("time labels must be strictly increasing")
        if any(d < 2 for d in dims):
            raise ValueError("slot dimensions must be at least 2")

    @classmethod
    def regular(cls, n_slots: int, dim: int = 2) -> "TimeGrid":
        return cls(tuple(float(k) for k in range(n_slots)), (dim,) * n_slots)

    @property
    def n_slots(self) -> int:
        return len(self.labels)


def _require_same_grid(a: TimeGrid, b: TimeGrid) -> None:
    if a != b:
        raise GridMismatchError("objects are defined on different time grids")


@dataclass(frozen=True)
class ElementaryHistory:
    """One operator per slot, earliest slot first."""

    grid: TimeGrid
    slots: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(_frozen(s) for s in self.slots)
        object.__setattr__(self, "slots", ops)
        if len(ops) != self.grid.n_slots:
            raise ShapeError("one slot operator required per grid slot")
        for op, d in zip(ops, self.grid.slot_dims):
            if op.shape != (d, d):
                raise ShapeError(f"slot operator shape {op.shape} does not match dim {d}")

    def is_projector_string(self, tol: float = 1e-9) -> bool:
        from .linalg import is_projector

        return all(is_projector(op, tol) for op in self.slots)

    def with_slot(self, index: int, op) -> "ElementaryHistory":
        ops = list(self.slots)
        ops[index] = op
        return ElementaryHistory(self.grid, tuple(ops))

    @classmethod
    def from_kets(cls, grid: TimeGrid, kets: Sequence) -> "ElementaryHistory":
        return cls(grid, tuple(projector(k) for k in kets))


def _same_string(a: ElementaryHistory, b: ElementaryHistory, tol: float = MERGE_TOL) -> bool:
    return all(max_abs(x - y) <= tol for x, y in zip(a.slots, b.slots))


@dataclass(frozen=True)
class HistoryState:
    """Complex-weighted superposition of elementary histories on one grid.

    Terms whose slot strings coincide (Hilbert-Schmidt distance below 1e-12
    per slot) are merged on construction, so equal-by-construction states have
    identical canonical term lists.
    """

    terms: tuple[tuple[complex, ElementaryHistory], ...]

    def __post_init__(self):
        terms = [(complex(c), eh) for c, eh in self.terms]
        if not terms:
            raise ValueError("a history state needs at least one term")
        grid = terms[0][1].grid
        for _, eh in terms:
            _require_same_grid(grid, eh.grid)
        merged: list[tuple[complex, ElementaryHistory]] = []
        for c, eh in terms:
            for i, (c0, eh0) in enumerate(merged):
                if _same_string(eh0, eh):
                    merged[i] = (c0 + c, eh0)
                    break
            else:
                merged.append((c, eh))
        scale = max((abs(c) for c, _ in merged), default=0.0)
        if scale > 0.0:
            kept = [(c, eh) for c, eh in merged if abs(c) > 1e-15 * scale]
            merged = kept or merged[:1]
        object.__setattr__(self, "terms", tuple(merged))

    @property
    def grid(self) -> TimeGrid:
        return self.terms[0][1].grid

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @classmethod
    def from_slots(cls, grid: TimeGrid, ops: Sequence, coefficient: complex = 1.0) -> "HistoryState":
        return cls(((coefficient, ElementaryHistory(grid, tuple(ops))),))

    @classmethod
    def from_elementary(cls, eh: ElementaryHistory, coefficient: complex = 1.0) -> "HistoryState":
        return cls(((coefficient, eh),))

    def __add__(self, other: "HistoryState") -> "HistoryState":
        _require_same_grid(self.grid, other.grid)
        return HistoryState(self.terms + other.terms)

    def __sub__(self, other: "HistoryState") -> "HistoryState":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "HistoryState":
        s = complex(scalar)
        return HistoryState(tuple((s * c, eh) for c, eh in self.terms))

    __rmul__ = __mul__


@dataclass(frozen=True)
class BridgingSet:
    """Unitary propagators T(t_{k+1}, t_k), one per adjacent slot pair."""

    grid: TimeGrid
    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(_frozen(u) for u in self.unitaries)
        object.__setattr__(self, "unitaries", mats)
        if len(mats) != self.grid.n_slots - 1:
            raise ShapeError("need exactly one bridge per adjacent slot pair")
        dims = self.grid.slot_dims
        for k, u in enumerate(mats):
            if u.shape != (dims[k + 1], dims[k]):
                raise ShapeError(f"bridge {k} shape {u.shape} incompatible with slot dims")
            if max_abs(u.conj().T @ u - identity(dims[k])) > UNITARITY_TOL:
                raise ValueError(f"bridge {k} is not unitary within {UNITARITY_TOL}")

    @classmethod
    def trivial(cls, grid: TimeGrid) -> "BridgingSet":
        if len(set(grid.slot_dims)) != 1:
            raise ShapeError("trivial bridging requires equal slot dimensions")
        d = grid.slot_dims[0]
        return cls(grid, tuple(identity(d) for _ in range(grid.n_slots - 1)))


def _as_state(h) -> HistoryState:
    if isinstance(h, HistoryState):
        return h
    if isinstance(h, ElementaryHistory):
        return HistoryState.from_elementary(h)
    raise TypeError(f"expected a history, got {type(h).__name__}")


# ---------------------------------------------------------------------------
# chain operators and weights


def chain_operator(h: ElementaryHistory, b: BridgingSet) -> np.ndarray:
    """Time-ordered product of slot operators and bridges, latest leftmost."""
    _require_same_grid(h.grid, b.grid)
    k = h.slots[0]
    for u, p in zip(b.unitaries, h.slots[1:]):
        k = p @ (u @ k)
    return k


def chain_operator_sum(h: HistoryState, b: BridgingSet) -> np.ndarray:
    """Coefficient-weighted sum of term chain operators (linear in terms)."""
    h = _as_state(h)
    _require_same_grid(h.grid, b.grid)
    out = None
    for c, eh in h.terms:
        k = c * chain_operator(eh, b)
        out = k if out is None else out + k
    return out


def weight(h, b: BridgingSet) -> float:
    """Tr(K^dag K) of the summed chain operator; zero is a valid weight."""
    k = chain_operator_sum(_as_state(h), b)
    w = float(np.vdot(k, k).real)
    return 0.0 if w < 0.0 else w


def decoherence_functional(h1, h2, b: BridgingSet) -> complex:
    k1 = chain_operator_sum(_as_state(h1), b)
    k2 = chain_operator_sum(_as_state(h2), b)
    return complex(np.vdot(k1, k2))


@dataclass(frozen=True)
class ConsistencyReport:
    """Pairwise decoherence functional for a family of histories."""

    consistent: bool
    matrix: np.ndarray
    max_offdiagonal: float
    tol: float

    def __bool__(self) -> bool:
        return self.consistent


def is_consistent_family(family: Sequence, b: BridgingSet, tol: float = 1e-9) -> ConsistencyReport:
    """Check |Tr(K_i^dag K_j)| <= tol for all i != j (medium decoherence)."""
    members = [_as_state(h) for h in family]
    if not members:
        raise ValueError("family must be nonempty")
    chains = [chain_operator_sum(h, b) for h in members]
    n = len(chains)
    d = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            d[i, j] = np.vdot(chains[i], chains[j])
    off = 0.0
    if n > 1:
        mask = ~np.eye(n, dtype=bool)
        off = float(np.max(np.abs(d[mask])))
    d.setflags(write=False)
    return ConsistencyReport(off <= tol, d, off, tol)


# ---------------------------------------------------------------------------
# Hilbert-Schmidt geometry


def hs_inner(h1, h2) -> complex:
    """Slot-wise Hilbert-Schmidt pairing, antilinear in the first argument."""
    h1, h2 = _as_state(h1), _as_state(h2)
    _require_same_grid(h1.grid, h2.grid)
    total = 0.0 + 0.0j
    for c1, e1 in h1.terms:
        for c2, e2 in h2.terms:
            prod = np.conj(c1) * c2
            for a, bop in zip(e1.slots, e2.slots):
                prod *= np.vdot(a, bop)  # Tr(a^dag b)
                if prod == 0:
                    break
            total += prod
    return complex(total)


def hs_norm(h) -> float:
    return math.sqrt(max(hs_inner(h, h).real, 0.0))


def normalize(h) -> HistoryState:
    h = _as_state(h)
    n = hs_norm(h)
    if n <= 1e-15:
        raise DegenerateHistoryError("cannot normalize a zero-norm history")
    return (1.0 / n) * h


def history_vector(h) -> np.ndarray:
    """Vectorize into the tensor product of per-slot operator spaces.

    Slot operators are flattened row-major, so the standard inner product of
    two history vectors equals ``hs_inner``.
    """
    h = _as_state(h)
    out = None
    for c, eh in h.terms:
        vecs = [op.reshape(-1) for op in eh.slots]
        v = vecs[0]
        for nxt in vecs[1:]:
            v = np.kron(v, nxt)
        v = c * v
        out = v if out is None else out + v
    return out


# ---------------------------------------------------------------------------
# mixtures


@dataclass(frozen=True)
class MixedHistory:
    """Classical ensemble of normalized history states (never a superposition)."""

    ensemble: tuple[tuple[float, HistoryState], ...]

    def __post_init__(self):
        ens = tuple((float(p), h) for p, h in self.ensemble)
        object.__setattr__(self, "ensemble", ens)
        if not ens:
            raise ValueError("ensemble must be nonempty")
        if any(p <= 0 for p, _ in ens):
            raise ValueError("ensemble probabilities must be positive")
        if abs(sum(p for p, _ in ens) - 1.0) > 1e-9:
            raise ValueError("ensemble probabilities must sum to 1")
        grid = ens[0][1].grid
        for _, h in ens:
            _require_same_grid(grid, h.grid)
            if abs(hs_norm(h) - 1.0) > 1e-9:
                raise ValueError("ensemble members must be normalized")

    @property
    def grid(self) -> TimeGrid:
        return self.ensemble[0][1].grid


def mix(ensemble: Iterable[tuple[float, object]]) -> MixedHistory:
    """Build a canonical MixedHistory, normalizing the member states."""
    return MixedHistory(tuple((p, normalize(h)) for p, h in ensemble))


def purity(m: MixedHistory) -> float:
    """Tr(rho^2) of the ensemble density operator in history space."""
    total = 0.0
    for p_i, h_i in m.ensemble:
        for p_j, h_j in m.ensemble:
            total += p_i * p_j * abs(hs_inner(h_i, h_j)) ** 2
    return float(total)


def mixed_history_density(m: MixedHistory) -> np.ndarray:
    """Density operator of the ensemble in the vectorized history space."""
    rho = None
    for p, h in m.ensemble:
        v = history_vector(h)
        contrib = p * np.outer(v, v.conj())
        rho = contrib if rho is None else rho + contrib
    return rho


def mixed_overlap(m: MixedHistory, target) -> float:
    """Fidelity <t|rho|t> of the ensemble with a normalized pure history."""
    t = _as_state(target)
    return float(sum(p * abs(hs_inner(t, h)) ** 2 for p, h in m.ensemble))


# ---------------------------------------------------------------------------
# temporal partial trace (over slots)


def temporal_partial_trace(h, keep_slots: Iterable[int], tol: float = 1e-12) -> MixedHistory:
    """Reduce a history state to a subset of slots.

    The normalized state is vectorized slot-wise, the discarded slots are
    contracted with the same partial-trace primitive used for spatial factors,
    and the resulting positive operator is returned as its eigen-ensemble.
    The output is a mixture: reductions of entangled histories are ensembles,
    not superpositions.
    """
    h = normalize(_as_state(h))
    grid = h.grid
    keep = sorted(set(int(k) for k in keep_slots))
    if not keep or len(keep) >= grid.n_slots:
        raise ValueError("keep_slots must be a nonempty proper subset of slots")
    if keep[0] < 0 or keep[-1] >= grid.n_slots:
        raise ValueError(f"keep_slots {keep} out of range")
    psi = history_vector(h)
    sq_dims = [d * d for d in grid.slot_dims]
    rho = partial_trace(np.outer(psi, psi.conj()), sq_dims, keep)
    evals, evecs = np.linalg.eigh(rho)
    kept_dims = [grid.slot_dims[k] for k in keep]
    sub_grid = TimeGrid(tuple(grid.labels[k] for k in keep), tuple(kept_dims))
    members: list[tuple[float, HistoryState]] = []
    for lam, vec in zip(evals[::-1], evecs.T[::-1]):
        if lam <= tol:
            continue
        members.append((float(lam), _devectorize(vec, sub_grid)))
    total = sum(p for p, _ in members)
    return MixedHistory(tuple((p / total, h_m) for p, h_m in members))


def _devectorize(vec: np.ndarray, grid: TimeGrid) -> HistoryState:
    """Expand a history-space vector over per-slot matrix-unit strings."""
    sq = tuple(d * d for d in grid.slot_dims)
    arr = vec.reshape(sq)
    terms = []
    for idx in np.argwhere(np.abs(arr) > 1e-14):
        coef = complex(arr[tuple(idx)])
        ops = []
        for q, d in zip(idx, grid.slot_dims):
            m = np.zeros((d, d), dtype=complex)
            m[divmod(int(q), d)] = 1.0
            ops.append(m)
        terms.append((coef, ElementaryHistory(grid, tuple(ops))))
    return HistoryState(tuple(terms))


# ---------------------------------------------------------------------------
# subsystem trace-out (spatial factor, all slots)


@dataclass(frozen=True)
class SubsystemReduction:
    """Reduced history of the kept factor plus its induced bridging."""

    state: HistoryState
    bridging: BridgingSet
    consistency: ConsistencyReport


def _split_product_unitary(u: np.ndarray, d0: int, d1: int, tol: float):
    """Factor u into u0 (x) u1 or raise NonFactorizableEvolutionError."""
    r = u.reshape(d0, d1, d0, d1).transpose(0, 2, 1, 3).reshape(d0 * d0, d1 * d1)
    w, s, vh = np.linalg.svd(r)
    if s.size > 1 and s[1] > tol:
        raise NonFactorizableEvolutionError(
            f"bridge does not factor across the {d0}x{d1} split (residual {s[1]:.2e})"
        )
    a = (w[:, 0] * math.sqrt(d0)).reshape(d0, d0)
    bmat = (vh[0] * math.sqrt(d1)).reshape(d1, d1)
    # fix the phase split so the kept candidate has a positive-real leading entry
    approx = np.kron(a, bmat)
    anchor = np.unravel_index(np.argmax(np.abs(approx)), approx.shape)
    phase = u[anchor] / approx[anchor]
    a = a * phase
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    rot = a[idx] / abs(a[idx])
    a = a / rot
    bmat = bmat * rot
    if max_abs(np.kron(a, bmat) - u) > tol:
        raise NonFactorizableEvolutionError("bridge is not a product of unitaries")
    return a, bmat


def subsystem_trace_out(
    h,
    b: BridgingSet,
    factor_dims: tuple[int, int],
    traced: int = 1,
    tol: float = UNITARITY_TOL,
) -> SubsystemReduction:
    """Trace one spatial tensor factor out of every slot of a history.

    Every slot dimension must equal ``factor_dims[0] * factor_dims[1]`` and
    every bridge must factor as U_keep (x) U_traced within ``tol``; otherwise
    the evolution is unsupported and NonFactorizableEvolutionError is raised.

    The discarded factor is contracted along classical record trajectories:
    for each computational-basis state of the traced factor, propagated
    through its own bridging, each slot operator is compressed to the kept
    factor by the traced-side expectation in that trajectory state, and the
    trajectories are summed.  A maximally entangled record thereby turns a
    product history of the pair into a superposed history of the kept factor.
    The result is renormalized and its term family re-checked for consistency
    under the induced bridging.  Slot operators of the output are rescaled to
    unit Hilbert-Schmidt norm with the scale absorbed into the coefficients,
    so rank-one projector slots come back as plain projectors.
    """
    h = _as_state(h)
    _require_same_grid(h.grid, b.grid)
    if traced not in (0, 1):
        raise ValueError("traced must be 0 or 1")
    d0, d1 = int(factor_dims[0]), int(factor_dims[1])
    if any(d != d0 * d1 for d in h.grid.slot_dims):
        raise ShapeError(f"slot dims must all equal {d0}*{d1}")
    keep_dim, traced_dim = (d1, d0) if traced == 0 else (d0, d1)

    kept_bridges, traced_bridges = [], []
    for u in b.unitaries:
        u0, u1 = _split_product_unitary(np.asarray(u), d0, d1, tol)
        kept_bridges.append(u1 if traced == 0 else u0)
        traced_bridges.append(u0 if traced == 0 else u1)

    sub_grid = TimeGrid(h.grid.labels, (keep_dim,) * h.grid.n_slots)
    induced = BridgingSet(sub_grid, tuple(kept_bridges))

    # record trajectories: basis state c at the first slot, propagated forward
    trajectories = []
    for c in range(traced_dim):
        states = [np.zeros(traced_dim, dtype=complex)]
        states[0][c] = 1.0
        for u in traced_bridges:
            states.append(u @ states[-1])
        trajectories.append(states)

    terms = []
    for coef, eh in h.terms:
        for states in trajectories:
            ops = []
            scale = 1.0
            for op, v in zip(eh.slots, states):
                four = op.reshape(d0, d1, d0, d1)
                if traced == 1:
                    red = np.einsum("ajbk,j,k->ab", four, v.conj(), v)
                else:
                    red = np.einsum("jakb,j,k->ab", four, v.conj(), v)
                # canonical slots: unit HS norm, scale pushed to the coefficient,
                # so projector slots come back as projectors and chain traces of
                # the reduced history carry no hidden per-slot factors
                size = float(np.linalg.norm(red))
                if size <= 1e-15:
                    scale = 0.0
                    break
                ops.append(red / size)
                scale *= size
            if scale > 0.0:
                terms.append((coef * scale, ElementaryHistory(sub_grid, tuple(ops))))
    if not terms:
        raise DegenerateHistoryError("every record trajectory contributes zero")

    state = normalize(HistoryState(tuple(terms)))
    family = [normalize(HistoryState.from_elementary(eh)) for _, eh in state.terms]
    report = is_consistent_family(family, induced)
    return SubsystemReduction(state, induced, report)


# ---------------------------------------------------------------------------
# small generators and searches


def exhaustive_projector_family(grid: TimeGrid) -> tuple[HistoryState, ...]:
    """All computational-basis projector strings on the grid.

    The family is exhaustive: the coefficient-one sum of its chain operators
    under trivial bridging is the identity.
    """
    choices = [range(d) for d in grid.slot_dims]
    out = []
    for combo in itertools.product(*choices):
        ops = []
        for i, d in zip(combo, grid.slot_dims):
            m = np.zeros((d, d), dtype=complex)
            m[i, i] = 1.0
            ops.append(m)
        out.append(HistoryState.from_slots(grid, ops))
    return tuple(out)


@dataclass(frozen=True)
class ReductionSearchResult:
    best_overlap: float
    upper_bound: float
    coefficients: tuple[complex, ...]
    evaluations: int


def best_joint_bell_reduction_overlap(
    restarts: int = 24, seed: int = 7, max_iter: int = 400
) -> ReductionSearchResult:
    """Search for a 3-slot qubit history whose two overlapping 2-slot
    reductions both match the Bell-like history (|00> + |11>)-type target.

    The search ranges over all complex coefficients on the eight
    computational-basis projector strings (the span in which both requested
    reductions can live), maximizing the smaller of the two reduction
    fidelities.  A rigorous eigenvalue bound on (F_01 + F_02)/2 caps the
    achievable value; both the searched maximum and the bound stay strictly
    below 1, which is the numerical content of the no-go for simultaneous
    Bell-type reductions.
    """
    from scipy.optimize import minimize

    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / math.sqrt(2)
    p_bell = np.outer(bell, bell.conj())
    eye = np.eye(2)

    def fidelities(c: np.ndarray) -> tuple[float, float]:
        psi = c / np.linalg.norm(c)
        rho = np.outer(psi, psi.conj())
        r01 = partial_trace(rho, [2, 2, 2], [0, 1])
        r12 = partial_trace(rho, [2, 2, 2], [1, 2])
        f1 = float(np.real(np.vdot(bell, r01 @ bell)))
        f2 = float(np.real(np.vdot(bell, r12 @ bell)))
        return f1, f2

    evals = 0

    def objective(x: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        c = x[:8] + 1j * x[8:]
        if np.linalg.norm(c) < 1e-8:
            return 0.0
        return -min(*fidelities(c))

    rng = np.random.default_rng(seed)
    ghz = np.zeros(16)
    ghz[0] = ghz[7] = 1.0
    w_like = np.zeros(16)
    w_like[1] = w_like[2] = w_like[4] = 1.0
    starts = [ghz, w_like, np.ones(16)]
    starts += [rng.standard_normal(16) for _ in range(restarts)]

    best_val, best_c = -1.0, None
    for x0 in starts:
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": max_iter, "maxfev": max_iter * 2},
        )
        val = -res.fun
        if val > best_val:
            best_val, best_c = val, res.x[:8] + 1j * res.x[8:]

    bound_op = np.kron(p_bell, eye) + np.kron(eye, p_bell)
    upper = float(np.linalg.eigvalsh(bound_op)[-1]) / 2.0
    best_c = best_c / np.linalg.norm(best_c)
    return ReductionSearchResult(best_val, upper, tuple(complex(z) for z in best_c), evals)
