import numpy as np
import pytest

import oracles
from z2memory import (
    DomainError,
    StateVector,
    basis_state,
    build_tfim,
    ghz_state,
    global_flip_expectation,
    stabilizer_check,
)


def test_constructor_domain():
    with pytest.raises(DomainError):
        build_tfim(2, 0.5)
    with pytest.raises(DomainError):
        build_tfim(4, np.inf)
    with pytest.raises(DomainError):
        build_tfim(4, np.nan)
    h = build_tfim(3, 0.0)
    assert h.dim == 8


def test_apply_matches_dense_oracle():
    rng = np.random.default_rng(5)
    for n, lam in ((3, 0.0), (4, 0.7), (5, -1.3), (6, 1.0)):
        dense = oracles.dense_h(n, lam)
        h = build_tfim(n, lam)
        psi = oracles.random_state(rng, n)
        assert np.abs(h.apply(psi) - dense @ psi).max() < 1e-13


def test_apply_state_wrapper():
    h = build_tfim(3, 0.5)
    out = h.apply_state(basis_state(3))
    assert isinstance(out, StateVector)
    # diagonal part of H on |000> is -N (all bonds aligned)
    assert out.amplitudes[0] == pytest.approx(-3.0)


def test_classical_point_spectrum_n3():
    # lam = 0: energies are -sum of bond alignments; on a 3-ring the
    # multiset is {-3 x2, +1 x6}
    vals = np.linalg.eigvalsh(oracles.dense_h(3, 0.0))
    assert np.abs(vals[:2] - (-3.0)).max() < 1e-12
    assert np.abs(vals[2:] - 1.0).max() < 1e-12
    h = build_tfim(3, 0.0)
    got = np.linalg.eigvalsh(
        np.column_stack([h.apply(col) for col in np.eye(8)])
    )
    assert np.abs(got - vals).max() < 1e-12


def test_field_sign_symmetry():
    # lam -> -lam is a basis change (rotate every spin about z), so the
    # spectrum cannot move
    a = np.linalg.eigvalsh(oracles.dense_h(4, 0.9))
    b = np.linalg.eigvalsh(oracles.dense_h(4, -0.9))
    assert np.abs(a - b).max() < 1e-12


def test_global_flip_expectation():
    assert global_flip_expectation(ghz_state(4)) == pytest.approx(1.0)
    assert global_flip_expectation(basis_state(4)) == pytest.approx(0.0)
    minus = StateVector(
        2, np.array([1.0, 0.0, 0.0, -1.0]) / np.sqrt(2)
    )
    assert global_flip_expectation(minus) == pytest.approx(-1.0)


def test_stabilizer_check_all_sizes():
    for n in range(3, 13):
        rep = stabilizer_check(n)
        assert rep.n_sites == n
        assert rep.code_dimension == 2
        assert rep.product_identity_residual < 1e-12
        assert max(rep.logical_commutation_residuals) < 1e-12


def test_stabilizer_check_range():
    with pytest.raises(DomainError):
        stabilizer_check(2)
    with pytest.raises(DomainError):
        stabilizer_check(13)
