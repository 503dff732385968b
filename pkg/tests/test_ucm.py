import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from qclone.qcore import RandomSource, StateVector, fidelity, haar_state
from qclone.ucm import (
    UniversalCloneSpec,
    clone_fidelity,
    clone_state_closed_form,
    measurement_clone_bound,
    reduced_clones,
    shrink_factor,
    symmetric_projector,
    symmetric_subspace_dim,
    werner_clone_channel,
)


def exact_eta(N, M, d):
    return Fraction(N, M) * Fraction(M + d, N + d)


def exact_fidelity(N, M, d):
    return Fraction(M - N + N * (M + d), M * (N + d))


def test_spec_validation():
    with pytest.raises(ValueError):
        UniversalCloneSpec(3, 2, 2)
    with pytest.raises(ValueError):
        UniversalCloneSpec(1, 2, 1)


def test_shrink_factor_examples():
    for d in (2, 3, 7):
        assert shrink_factor(UniversalCloneSpec(3, 3, d)) == 1
    assert shrink_factor(UniversalCloneSpec(1, 2, 2)) == pytest.approx(2 / 3, abs=1e-15)
    assert abs(shrink_factor(UniversalCloneSpec(1, 10**6, 3)) - 0.25) < 1e-5


def test_clone_fidelity_examples():
    assert clone_fidelity(UniversalCloneSpec(2, 2, 4)) == 1
    assert clone_fidelity(UniversalCloneSpec(1, 2, 2)) == pytest.approx(5 / 6, abs=1e-15)
    assert clone_fidelity(UniversalCloneSpec(1, 2, 3)) == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("d", range(2, 9))
def test_formulas_match_rational_oracle(d):
    for M in range(1, 6):
        for N in range(1, M + 1):
            spec = UniversalCloneSpec(N, M, d)
            eta, F = exact_eta(N, M, d), exact_fidelity(N, M, d)
            assert (1 - eta) / d + eta == F
            assert abs(shrink_factor(spec) - float(eta)) < 1e-15
            assert abs(clone_fidelity(spec) - float(F)) < 1e-15


def test_measurement_bound_examples():
    assert measurement_clone_bound(1, 2) == pytest.approx(2 / 3)
    assert measurement_clone_bound(1, 4) == pytest.approx(0.4)
    assert measurement_clone_bound(10**6, 3) > 0.99999
    # the M -> infinity limit of the clone fidelity
    assert abs(clone_fidelity(UniversalCloneSpec(2, 10**7, 3)) - measurement_clone_bound(2, 3)) < 1e-6


def test_fidelity_monotonicity_and_measurement_gap():
    for d in range(2, 6):
        for N in range(1, 5):
            for M in range(N + 1, 6):
                f = clone_fidelity(UniversalCloneSpec(N, M, d))
                if M < 5:
                    assert clone_fidelity(UniversalCloneSpec(N, M + 1, d)) < f
                if N + 1 < M:
                    assert clone_fidelity(UniversalCloneSpec(N + 1, M, d)) > f
                assert f > measurement_clone_bound(N, d)


def test_closed_form_examples():
    zero = StateVector.basis(2, 0)
    np.testing.assert_allclose(clone_state_closed_form(zero, UniversalCloneSpec(1, 2, 2)).matrix, np.diag([5 / 6, 1 / 6]), atol=1e-15)
    np.testing.assert_allclose(
        clone_state_closed_form(StateVector.basis(3, 0), UniversalCloneSpec(1, 2, 3)).matrix,
        np.diag([0.75, 0.125, 0.125]),
        atol=1e-15,
    )
    psi = haar_state(3, RandomSource(1))
    np.testing.assert_allclose(clone_state_closed_form(psi, UniversalCloneSpec(2, 2, 3)).matrix, psi.projector().matrix, atol=1e-15)
    with pytest.raises(ValueError):
        clone_state_closed_form(zero, UniversalCloneSpec(1, 2, 3))


def test_closed_form_fidelity_is_formula():
    rng = RandomSource(100)
    for _ in range(100):
        spec = UniversalCloneSpec(1 + rng.choice_index(2), 3 + rng.choice_index(2), 2 + rng.choice_index(4))
        psi = haar_state(spec.d, rng)
        assert abs(fidelity(psi, clone_state_closed_form(psi, spec)) - clone_fidelity(spec)) < 1e-12


def _symmetric_basis_projector(d, M):
    """Oracle: sum of |s><s| over normalized symmetrized occupation states."""
    P = np.zeros((d**M, d**M))
    for occ in itertools.combinations_with_replacement(range(d), M):
        v = np.zeros(d**M)
        for word in set(itertools.permutations(occ)):
            v[np.ravel_multi_index(word, (d,) * M)] = 1.0
        v /= np.linalg.norm(v)
        P += np.outer(v, v)
    return P


@pytest.mark.parametrize("d,M", [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (3, 3), (2, 4)])
def test_symmetric_projector(d, M):
    S = symmetric_projector(d, M).matrix
    np.testing.assert_allclose(S @ S, S, atol=1e-13)
    np.testing.assert_allclose(S, S.conj().T, atol=1e-15)
    assert round(np.trace(S).real) == math.comb(d + M - 1, M) == symmetric_subspace_dim(d, M)
    np.testing.assert_allclose(S, _symmetric_basis_projector(d, M), atol=1e-13)
    if M == 1:
        np.testing.assert_allclose(S, np.eye(d))


def test_symmetric_projector_on_01():
    S = symmetric_projector(2, 2).matrix
    np.testing.assert_allclose(S @ np.array([0, 1, 0, 0]), [0, 0.5, 0.5, 0], atol=1e-15)


def test_symmetric_projector_size_limit():
    with pytest.raises(ValueError):
        symmetric_projector(2, 13)


def test_channel_trivial_when_n_equals_m():
    psi = haar_state(2, RandomSource(4))
    out = werner_clone_channel(psi, UniversalCloneSpec(2, 2, 2))
    pp = np.kron(psi.projector().matrix, psi.projector().matrix)
    np.testing.assert_allclose(out.matrix, pp, atol=1e-12)


def test_channel_zero_state():
    joint = werner_clone_channel(StateVector.basis(2, 0), UniversalCloneSpec(1, 2, 2))
    for rho in reduced_clones(joint, 2, 2):
        np.testing.assert_allclose(rho.matrix, np.diag([5 / 6, 1 / 6]), atol=1e-12)


@pytest.mark.parametrize("N,M,d", [(1, 2, 2), (1, 3, 2), (2, 3, 2), (1, 2, 3), (1, 4, 2), (2, 4, 2)])
def test_channel_matches_closed_form(N, M, d):
    rng = RandomSource(N * 100 + M * 10 + d)
    spec = UniversalCloneSpec(N, M, d)
    for _ in range(20):
        psi = haar_state(d, rng)
        expected = clone_state_closed_form(psi, spec).matrix
        clones = reduced_clones(werner_clone_channel(psi, spec), d, M)
        for rho in clones:
            np.testing.assert_allclose(rho.matrix, expected, atol=1e-10)
            assert abs(fidelity(psi, rho) - clone_fidelity(spec)) < 1e-10
        for rho in clones[1:]:
            np.testing.assert_allclose(rho.matrix, clones[0].matrix, atol=1e-12)
