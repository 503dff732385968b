"""Probabilistic exact cloning and unambiguous identification.

A family of linearly independent states ``psi_i`` admits a postselected
1 -> 2 cloner succeeding on input ``i`` with probability ``gamma_i`` iff

    X1 - sqrt(G) X2 sqrt(G)  is positive semidefinite,

and an unambiguous identifier with per-state success ``gamma_i`` iff

    X1 - G  is positive semidefinite,

where ``G = diag(gamma)`` and ``Xn[i, j] = (s_i s_j <psi_i|psi_j>)^n``.  The
signs ``s_i`` choose phase representatives of the states; they change X1
but never X2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .qcore import PSD_TOL, StateVector, hermitian_eigenvalues

log = logging.getLogger(__name__)

INDEPENDENCE_TOL = 1e-9
GRID_STEP = 0.02
FINAL_STEP = 1e-6
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StateFamily:
    states: tuple[StateVector, ...]
    signs: tuple[int, ...] = ()

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValueError("family needs at least one state")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise ValueError(f"family states have mixed dimensions {sorted(dims)}")
        signs = tuple(self.signs) or (1,) * len(states)
        if len(signs) != len(states) or any(s not in (1, -1) for s in signs):
            raise ValueError("signs must be one +1/-1 per state")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "signs", tuple(int(s) for s in signs))
        lam = hermitian_eigenvalues(self._overlaps())[0]
        if lam <= INDEPENDENCE_TOL:
            raise ValueError(f"states are not linearly independent (min Gram eigenvalue {lam:.3e})")

    def __len__(self) -> int:
        return len(self.states)

    def _overlaps(self) -> np.ndarray:
        vecs = np.array([s.amplitudes for s in self.states])
        return vecs.conj() @ vecs.T

    def with_signs(self, signs: Sequence[int]) -> "StateFamily":
        return StateFamily(self.states, tuple(signs))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    n: int
    entries: np.ndarray


def gram(family: StateFamily, n: int = 1) -> GramMatrix:
    if n < 1:
        raise ValueError("power index must be >= 1")
    s = np.array(family.signs, dtype=float)
    base = np.outer(s, s) * family._overlaps()
    entries = base**n
    entries.setflags(write=False)
    return GramMatrix(n, entries)


def _check_gammas(family: StateFamily, gammas) -> np.ndarray:
    g = np.asarray(gammas, dtype=float)
    if g.shape != (len(family),):
        raise ValueError(f"need {len(family)} efficiencies, got shape {g.shape}")
    if np.any(g < 0.0) or np.any(g > 1.0):
        raise ValueError("efficiencies must lie in [0, 1]")
    return g


def cloning_residual(family: StateFamily, gammas) -> np.ndarray:
    g = np.sqrt(_check_gammas(family, gammas))
    return gram(family, 1).entries - np.outer(g, g) * gram(family, 2).entries


def identification_residual(family: StateFamily, gammas) -> np.ndarray:
    g = _check_gammas(family, gammas)
    return gram(family, 1).entries - np.diag(g)


def residual_min_eigenvalue(family: StateFamily, gammas, mode: str = "cloning") -> float:
    return float(hermitian_eigenvalues(_RESIDUALS[mode](family, gammas))[0])


def cloning_feasible(family: StateFamily, gammas, tol: float = PSD_TOL) -> bool:
    return residual_min_eigenvalue(family, gammas, "cloning") >= -tol


def identification_feasible(family: StateFamily, gammas, tol: float = PSD_TOL) -> bool:
    return residual_min_eigenvalue(family, gammas, "identification") >= -tol


_RESIDUALS = {"cloning": cloning_residual, "identification": identification_residual}


@dataclass
class OptimizationResult:
    gammas: np.ndarray
    value: float
    mode: str
    evaluations: int = 0
    min_eigenvalue: float = field(default=float("nan"))


def optimize_efficiencies(
    family: StateFamily,
    objective: Callable[[np.ndarray], float],
    symmetry: Sequence[Sequence[int]] | None = None,
    mode: str = "cloning",
    *,
    grid_step: float = GRID_STEP,
    final_step: float = FINAL_STEP,
    tol: float = FEASIBILITY_TOL,
) -> OptimizationResult:
    """Maximize ``objective(gammas)`` over the feasible efficiency region.

    ``symmetry`` lists groups of state indices forced to share one
    efficiency (e.g. ``[[0], [1, 2]]``); by default every state is free.

    The search is a feasibility-filtered grid over the reduced unit cube,
    followed by compass pattern search whose step halves from ``grid_step``
    down to ``final_step``.  Trial points that leave the feasible region are
    pulled back along the ray to the origin (the region is star-shaped about
    ``gamma = 0``), so the search can slide along the boundary where the
    optimum of a monotone objective sits.  Ties go to the larger first
    efficiency.
    """
    if mode not in _RESIDUALS:
        raise ValueError(f"unknown mode {mode!r}")
    k = len(family)
    groups = [list(g) for g in symmetry] if symmetry else [[i] for i in range(k)]
    covered = sorted(i for g in groups for i in g)
    if covered != list(range(k)):
        raise ValueError("symmetry groups must partition the state indices")
    residual = _RESIDUALS[mode]
    n_eval = 0

    def expand(x: np.ndarray) -> np.ndarray:
        g = np.empty(k)
        for val, grp in zip(x, groups):
            g[grp] = val
        return g

    def feasible(x: np.ndarray) -> bool:
        nonlocal n_eval
        n_eval += 1
        return hermitian_eigenvalues(residual(family, expand(x)))[0] >= -tol

    def better(fa, xa, fb, xb) -> bool:
        # ties (to rounding) are broken toward the larger first coordinate
        if fa > fb + 1e-15:
            return True
        return abs(fa - fb) <= 1e-15 and xa[0] > xb[0]

    def pull_back(x: np.ndarray) -> np.ndarray:
        if feasible(x):
            return x
        lo, hi = 0.0, 1.0
        while hi - lo > 1e-13:
            mid = 0.5 * (lo + hi)
            if feasible(mid * x):
                lo = mid
            else:
                hi = mid
        return lo * x

    dim = len(groups)
    ticks = np.linspace(0.0, 1.0, int(round(1.0 / grid_step)) + 1)
    best_x = np.zeros(dim)
    best_f = float(objective(expand(best_x)))
    for point in np.stack(np.meshgrid(*([ticks] * dim), indexing="ij"), -1).reshape(-1, dim):
        if not feasible(point):
            continue
        f = float(objective(expand(point)))
        if better(f, point, best_f, best_x):
            best_f, best_x = f, point.copy()
    log.debug("grid optimum %s -> %.9f", expand(best_x), best_f)

    directions = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        directions += [e, -e]
    step = grid_step
    while step >= final_step:
        improved = False
        for e in directions:
            trial = np.clip(best_x + step * e, 0.0, 1.0)
            if np.array_equal(trial, best_x):
                continue
            trial = pull_back(trial)
            f = float(objective(expand(trial)))
            if better(f, trial, best_f, best_x):
                best_f, best_x, improved = f, trial, True
                break
        if not improved:
            step *= 0.5
    gammas = expand(best_x)
    lam = float(hermitian_eigenvalues(residual(family, gammas))[0])
    log.debug("refined optimum %s -> %.9f (%d feasibility checks)", gammas, best_f, n_eval)
    return OptimizationResult(gammas, best_f, mode, n_eval, lam)


@dataclass(frozen=True, eq=False)
class CloningMachine:
    """Postselected 1 -> 2 cloner: a state family with per-state efficiencies."""

    family: StateFamily
    gammas: tuple[float, ...]
    tol: float = 1e-3

    def __post_init__(self):
        g = _check_gammas(self.family, self.gammas)
        object.__setattr__(self, "gammas", tuple(float(x) for x in g))
        lam = residual_min_eigenvalue(self.family, g, "cloning")
        if lam < -self.tol:
            raise ValueError(f"efficiencies {self.gammas} are not achievable (residual eigenvalue {lam:.3e})")

    def average_success(self, prior=None) -> float:
        g = np.array(self.gammas)
        p = np.full(len(g), 1.0 / len(g)) if prior is None else np.asarray(prior, dtype=float)
        return float(p @ g)


@dataclass(frozen=True, eq=False)
class CloneOutcome:
    success: float
    failure: float
    clones: StateVector


def simulate_prob_clone(machine: CloningMachine, index: int) -> CloneOutcome:
    """Exact flag statistics for input ``index``; success yields two perfect copies.

    The flag is a single common success outcome, so it reveals nothing about
    which input was cloned.  On failure the quantum output is discarded.
    """
    if not 0 <= index < len(machine.family):
        raise IndexError(f"no state {index} in family of {len(machine.family)}")
    psi = machine.family.states[index].amplitudes
    g = machine.gammas[index]
    return CloneOutcome(g, 1.0 - g, StateVector(np.kron(psi, psi)))


def posterior_given_failure(machine: CloningMachine, prior=None) -> np.ndarray:
    k = len(machine.family)
    p = np.full(k, 1.0 / k) if prior is None else np.asarray(prior, dtype=float)
    if p.shape != (k,) or abs(p.sum() - 1.0) > 1e-12 or np.any(p < 0):
        raise ValueError("prior must be a probability vector over the family")
    w = p * (1.0 - np.array(machine.gammas))
    total = w.sum()
    if total <= 0.0:
        raise ZeroDivisionError("cloning never fails under this prior; posterior undefined")
    return w / total
