"""Universal (state-independent) N -> M cloning of d-level systems.

Two independent routes to the same clones:

* closed form: every clone is ``(1 - eta) I/d + eta |psi><psi|`` with the
  optimal shrink factor ``eta = (N/M) (M + d) / (N + d)``;
* explicit channel: project ``|psi><psi|^{(x)N} (x) I^{(x)(M-N)}`` onto the
  symmetric subspace of M systems and renormalize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .qcore import DensityOperator, Operator, StateVector, partial_trace

MAX_JOINT_DIM = 4096


@dataclass(frozen=True)
class UniversalCloneSpec:
    N: int
    M: int
    d: int

    def __post_init__(self):
        if not 1 <= self.N <= self.M:
            raise ValueError(f"need 1 <= N <= M, got N={self.N}, M={self.M}")
        if self.d < 2:
            raise ValueError(f"need d >= 2, got d={self.d}")


def shrink_factor(spec: UniversalCloneSpec) -> float:
    N, M, d = spec.N, spec.M, spec.d
    return (N / M) * (M + d) / (N + d)


def clone_fidelity(spec: UniversalCloneSpec) -> float:
    """Single-clone fidelity of the optimal universal N -> M cloner."""
    N, M, d = spec.N, spec.M, spec.d
    return (M - N + N * (M + d)) / (M * (N + d))


def measurement_clone_bound(N: int, d: int) -> float:
    """Fidelity reachable by estimating N copies and re-preparing (M -> infinity)."""
    if N < 1 or d < 2:
        raise ValueError("need N >= 1 and d >= 2")
    return (N + 1) / (N + d)


def clone_state_closed_form(psi: StateVector, spec: UniversalCloneSpec) -> DensityOperator:
    if psi.dim != spec.d:
        raise ValueError(f"state dimension {psi.dim} != spec.d={spec.d}")
    eta = shrink_factor(spec)
    v = psi.amplitudes
    return DensityOperator((1 - eta) * np.eye(spec.d) / spec.d + eta * np.outer(v, v.conj()))


def _permutation_matrix(d: int, perm: tuple[int, ...]) -> np.ndarray:
    """Operator sending ``|i_0 ... i_{M-1}>`` to ``|i_perm^-1(0) ...>``."""
    M = len(perm)
    idx = np.indices((d,) * M).reshape(M, -1)
    target = np.ravel_multi_index(idx[list(perm)], (d,) * M)
    P = np.zeros((d**M, d**M))
    P[target, np.arange(d**M)] = 1.0
    return P


@lru_cache(maxsize=32)
def _symmetric_projector_array(d: int, M: int) -> np.ndarray:
    S = sum(_permutation_matrix(d, p) for p in permutations(range(M)))
    S = S / math.factorial(M)
    S.setflags(write=False)
    return S


def symmetric_projector(d: int, M: int) -> Operator:
    """Projector onto the symmetric subspace of ``(C^d)^{(x)M}``.

    Built as the average of all ``M!`` subsystem permutation operators, so
    keep M small (it is at most 5 in this package's harnesses).
    """
    if d < 1 or M < 1:
        raise ValueError("need d >= 1 and M >= 1")
    if d**M > MAX_JOINT_DIM:
        raise ValueError(f"d**M = {d**M} exceeds the size limit {MAX_JOINT_DIM}")
    return Operator(_symmetric_projector_array(d, M))


def symmetric_subspace_dim(d: int, M: int) -> int:
    return math.comb(d + M - 1, M)


def werner_clone_channel(psi: StateVector, spec: UniversalCloneSpec) -> DensityOperator:
    """Joint M-system output of the optimal universal cloner on ``psi^{(x)N}``."""
    N, M, d = spec.N, spec.M, spec.d
    if psi.dim != d:
        raise ValueError(f"state dimension {psi.dim} != spec.d={d}")
    S = symmetric_projector(d, M).matrix
    v = psi.amplitudes
    inp = np.outer(v, v.conj())
    for _ in range(N - 1):
        inp = np.kron(inp, np.outer(v, v.conj()))
    inp = np.kron(inp, np.eye(d ** (M - N)))
    out = S @ inp @ S
    tr = np.trace(out).real
    if tr <= 0.0:
        raise ArithmeticError("symmetric projection annihilated the input")
    return DensityOperator(out / tr)


def reduced_clones(joint: DensityOperator, d: int, M: int) -> list[DensityOperator]:
    """Single-system marginals of an M-system joint clone state."""
    return [partial_trace(joint, [d] * M, k) for k in range(M)]
