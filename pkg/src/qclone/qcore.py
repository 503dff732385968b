"""Dense linear algebra and quantum-state utilities for small systems.

Conventions
-----------
Multi-system index arithmetic puts the first tensor factor in the most
significant position, i.e. ``|a>|b>`` lives at index ``a * dim_b + b``.
Every module in the package follows this ordering.

All value types are immutable; their numpy buffers are flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
PSD_TOL = 1e-9
MIN_EIG_TOL = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of a ``dim``-level system."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size == 0:
            raise ValueError("state must have at least one amplitude")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (squared norm {norm2!r})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        """Build a state from an arbitrary non-zero vector by rescaling it."""
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "StateVector":
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    def projector(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        _check_dims(self.dim, other.dim)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim}, amplitudes={np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True, eq=False)
class Operator:
    """Complex matrix, optionally flagged (and checked) as unitary."""

    matrix: np.ndarray
    unitary: bool = False

    def __post_init__(self):
        mat = _frozen(np.atleast_2d(self.matrix))
        if mat.ndim != 2:
            raise ValueError("operator matrix must be two-dimensional")
        if self.unitary:
            if mat.shape[0] != mat.shape[1]:
                raise ValueError("unitary operator must be square")
            err = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
            if err > UNITARY_TOL:
                raise ValueError(f"operator is not unitary (max |U^dag U - I| = {err:.3e})")
        object.__setattr__(self, "matrix", mat)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def identity(cls, dim: int) -> "Operator":
        return cls(np.eye(dim), unitary=True)

    def apply(self, psi: StateVector) -> StateVector:
        _check_dims(self.cols, psi.dim)
        return StateVector(self.matrix @ psi.amplitudes)

    def conjugate(self, rho: "DensityOperator") -> "DensityOperator":
        """``U rho U^dag``."""
        _check_dims(self.cols, rho.dim)
        return DensityOperator(self.matrix @ rho.matrix @ self.matrix.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix @ other.matrix, unitary=self.unitary and other.unitary)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Mixed state: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen(np.atleast_2d(self.matrix))
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        lam = hermitian_eigenvalues(mat)[0]
        if lam < -MIN_EIG_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lam!r}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)


class RandomSource:
    """Deterministic stream of random draws keyed by ``(seed, stream)``.

    Uniforms come from the counter-based Philox generator keyed by a
    :class:`numpy.random.SeedSequence` with ``spawn_key=(stream,)``, so
    streams for different shard indices are independent and reproducible.
    Gaussian draws use the Box-Muller transform on those uniforms.
    """

    def __init__(self, seed: int = 0, stream: int = 0):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if stream < 0:
            raise ValueError("stream index must be non-negative")
        self.seed = int(seed)
        self.stream = int(stream)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self._gen = np.random.Generator(np.random.Philox(seq))

    def uniform(self, size=None):
        """Uniform draws on the half-open interval [0, 1)."""
        return self._gen.random(size)

    def complex_normal(self, size) -> np.ndarray:
        """Standard complex Gaussians, E|z|^2 = 1 (Box-Muller)."""
        u1 = 1.0 - self.uniform(size)  # (0, 1], keeps log finite
        u2 = self.uniform(size)
        return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)

    def choice_index(self, n: int) -> int:
        return min(int(self.uniform() * n), n - 1)


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} != {b}")


def tensor(a, b):
    """Kronecker product of two states or two operators (``a`` most significant)."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(np.kron(a.matrix, b.matrix))
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.matrix, b.matrix), unitary=a.unitary and b.unitary)
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def partial_trace(rho: DensityOperator, dims: Sequence[int], keep) -> DensityOperator:
    """Reduced state on the subsystem(s) ``keep`` of a multipartite state.

    ``keep`` may be one index or a sequence of indices; kept subsystems stay
    in their original order.
    """
    dims = [int(x) for x in dims]
    if int(np.prod(dims)) != rho.dim:
        raise ValueError(f"subsystem dims {dims} do not multiply to {rho.dim}")
    keep = [keep] if np.isscalar(keep) else list(keep)
    n = len(dims)
    if not keep or any(not 0 <= k < n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid subsystems to keep: {keep}")
    keep = sorted(keep)
    traced = [i for i in range(n) if i not in keep]
    t = rho.matrix.reshape(dims + dims)
    # contract each traced subsystem's row and column index
    for offset, i in enumerate(traced):
        axis = i - offset
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    kd = int(np.prod([dims[k] for k in keep]))
    return DensityOperator(t.reshape(kd, kd))


def fidelity(psi: StateVector, rho: DensityOperator) -> float:
    """``<psi|rho|psi>`` for a pure reference state."""
    _check_dims(psi.dim, rho.dim)
    v = psi.amplitudes
    f = float(np.vdot(v, rho.matrix @ v).real)
    return min(max(f, 0.0), 1.0)


def _as_matrix(h) -> np.ndarray:
    if isinstance(h, (Operator, DensityOperator)):
        return h.matrix
    return np.asarray(h, dtype=complex)


def hermitian_eigenvalues(h) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    A complex Hermitian ``A + iB`` is diagonalized through its real symmetric
    embedding ``[[A, -B], [B, A]]``, whose spectrum is that of ``A + iB`` with
    every eigenvalue doubled.
    """
    mat = _as_matrix(h)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("eigenvalues require a square matrix")
    if mat.size and np.max(np.abs(mat - mat.conj().T)) > UNITARY_TOL:
        raise ValueError("matrix is not Hermitian")
    re = 0.5 * (mat.real + mat.real.T)
    im = 0.5 * (mat.imag - mat.imag.T)
    if not np.any(im):
        return _kernels.symmetric_eigenvalues(re)
    emb = np.block([[re, -im], [im, re]])
    ev = _kernels.symmetric_eigenvalues(emb)
    return 0.5 * (ev[0::2] + ev[1::2])


def is_psd(h, tol: float = PSD_TOL) -> bool:
    return bool(hermitian_eigenvalues(h)[0] >= -tol)


def haar_unitary(d: int, rng: RandomSource) -> Operator:
    """Haar-distributed element of U(d).

    QR-factorizes a complex Ginibre matrix and rescales the columns of Q so
    that R has a real positive diagonal, which makes the factorization
    unique and the result exactly Haar.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    z = rng.complex_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))
    return Operator(q, unitary=True)


def haar_state(d: int, rng: RandomSource) -> StateVector:
    """First column of a Haar unitary, i.e. a uniformly random pure state."""
    return StateVector(haar_unitary(d, rng).matrix[:, 0])


def measure_in_basis(psi: StateVector, basis) -> dict:
    """Outcome probabilities ``|<b_k|psi>|^2`` for an orthonormal (partial) basis.

    ``basis`` is either a mapping ``label -> StateVector`` or a sequence, in
    which case labels are the positions ``0, 1, ...``.
    """
    items = list(basis.items()) if isinstance(basis, Mapping) else list(enumerate(basis))
    vecs = np.array([b.amplitudes for _, b in items])
    if vecs.shape[1] != psi.dim:
        raise ValueError("basis vectors and state differ in dimension")
    if len(items) > psi.dim:
        raise ValueError("more basis vectors than dimensions")
    gram = vecs.conj() @ vecs.T
    if np.max(np.abs(gram - np.eye(len(items)))) > UNITARY_TOL:
        raise ValueError("basis vectors are not orthonormal")
    amps = vecs.conj() @ psi.amplitudes
    return {label: float(abs(a) ** 2) for (label, _), a in zip(items, amps)}
