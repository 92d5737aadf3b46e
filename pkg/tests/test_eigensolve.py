import numpy as np
import pytest

import oracles
import z2memory.eigensolve as es
from z2memory import (
    CapabilityError,
    ContractError,
    ConvergenceError,
    DomainError,
    EigenPairs,
    StateVector,
    adiabatic_time_estimate,
    basis_state,
    build_tfim,
    full_spectrum,
    gap_scan,
    ghz_state,
    lowest_eigenpairs,
    mz_diagonal,
    superposed_state,
)

# Anchor values computed once from the dense spectrum and frozen here.
E0_N8_HALF = -8.5090822351402782
E1_N8_HALF = -8.5076263876395029
GAP_N8_HALF = 0.0014558475007753202


def test_input_validation():
    h = build_tfim(6, 0.5)
    with pytest.raises(DomainError):
        lowest_eigenpairs(h, 0)
    with pytest.raises(DomainError):
        lowest_eigenpairs(h, 5)
    with pytest.raises(DomainError):
        lowest_eigenpairs(h, 1, tol=1e-13)


def test_frozen_anchor_n8(solve_cache):
    pairs = solve_cache(8, 0.5, k=2)
    assert pairs.eigenvalues[0] == pytest.approx(E0_N8_HALF, abs=1e-9)
    assert pairs.eigenvalues[1] == pytest.approx(E1_N8_HALF, abs=1e-9)
    assert pairs.gap == pytest.approx(GAP_N8_HALF, abs=1e-9)
    assert pairs.parities[0] == 1.0
    assert pairs.parities[1] == -1.0
    assert max(pairs.residuals) < es.RESIDUAL_BOUND


def test_matches_dense_diagonalization():
    # independent route: brute-force eigh of the kron-built matrix
    for n in (3, 4, 5, 6):
        for lam in (0.3, 1.0):
            want = np.linalg.eigvalsh(oracles.dense_h(n, lam))[:4]
            got = lowest_eigenpairs(build_tfim(n, lam), 4).eigenvalues
            assert np.abs(got - want).max() < 1e-9


def test_eigenvectors_have_true_small_residuals():
    n, lam = 7, 0.8
    dense = oracles.dense_h(n, lam)
    pairs = lowest_eigenpairs(build_tfim(n, lam), 3)
    for val, vec in zip(pairs.eigenvalues, pairs.eigenvectors):
        r = np.linalg.norm(dense @ vec.amplitudes - val * vec.amplitudes)
        assert r < 1e-9 * max(1.0, abs(val))


def test_vectors_are_flip_parity_eigenstates():
    pairs = lowest_eigenpairs(build_tfim(8, 0.5), 2)
    for vec, par in zip(pairs.eigenvectors, pairs.parities):
        amps = vec.amplitudes
        assert np.abs(amps[::-1] - par * amps).max() < 1e-8


def test_orthonormality_across_sectors():
    pairs = lowest_eigenpairs(build_tfim(9, 1.2), 4)
    vecs = np.column_stack([v.amplitudes for v in pairs.eigenvectors])
    gram = vecs.conj().T @ vecs
    assert np.abs(gram - np.eye(4)).max() < 1e-9


def test_exact_degeneracy_at_zero_field():
    # lam = 0, N = 4: the two fully aligned states give a two-fold
    # degenerate ground level at -N, one state in each flip sector
    pairs = lowest_eigenpairs(build_tfim(4, 0.0), 2)
    assert pairs.eigenvalues[0] == pytest.approx(-4.0, abs=1e-10)
    assert pairs.eigenvalues[1] == pytest.approx(-4.0, abs=1e-10)
    assert sorted(pairs.parities) == [-1.0, 1.0]


def test_repeat_runs_are_deterministic():
    a = lowest_eigenpairs(build_tfim(8, 0.5), 2)
    b = lowest_eigenpairs(build_tfim(8, 0.5), 2)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    for va, vb in zip(a.eigenvectors, b.eigenvectors):
        assert np.array_equal(va.amplitudes, vb.amplitudes)


def test_eigenpairs_contract_rejects_bad_order():
    v0 = basis_state(3, 0)
    v1 = basis_state(3, 1)
    with pytest.raises(ContractError):
        EigenPairs(
            eigenvalues=np.array([1.0, 0.0]),
            eigenvectors=(v0, v1),
            residuals=np.array([0.0, 0.0]),
            parities=np.array([1.0, 1.0]),
        )


def test_eigenpairs_contract_rejects_large_residual():
    with pytest.raises(ContractError):
        EigenPairs(
            eigenvalues=np.array([0.0]),
            eigenvectors=(basis_state(3, 0),),
            residuals=np.array([1e-3]),
            parities=np.array([1.0]),
        )


def test_eigenpairs_contract_rejects_nonorthogonal():
    v = basis_state(3, 0)
    with pytest.raises(ContractError):
        EigenPairs(
            eigenvalues=np.array([0.0, 1.0]),
            eigenvectors=(v, v),
            residuals=np.array([0.0, 0.0]),
            parities=np.array([1.0, 1.0]),
        )


def test_gap_property_needs_two_levels():
    pairs = lowest_eigenpairs(build_tfim(6, 0.5), 1)
    with pytest.raises(DomainError):
        pairs.gap


def test_convergence_error_on_tiny_budget(monkeypatch):
    monkeypatch.setattr(es, "MATVEC_BUDGET", 3)
    with pytest.raises(ConvergenceError) as exc:
        lowest_eigenpairs(build_tfim(8, 0.5), 1)
    best = exc.value.best_residual
    assert best is None or best >= 0.0


def test_full_spectrum_small_chain():
    h = build_tfim(5, 0.7)
    solved = full_spectrum(h)
    want = np.linalg.eigvalsh(oracles.dense_h(5, 0.7))
    assert np.abs(solved.eigenvalues - want).max() < 1e-9
    assert abs(solved.eigenvalues.sum()) < 1e-8  # traceless Hamiltonian
    # reconstruction residual on random probes
    rng = np.random.default_rng(17)
    for _ in range(3):
        x = oracles.random_state(rng, 5)
        rebuilt = solved.basis @ (solved.eigenvalues * (solved.basis.T @ x))
        assert np.linalg.norm(h.apply(x) - rebuilt) < 1e-8


def test_full_spectrum_size_cap():
    with pytest.raises(CapabilityError):
        full_spectrum(build_tfim(11, 0.5))


def test_gap_scan_values_and_domain():
    frozen = {
        4: 0.035490432639925906,
        5: 0.015402451454491484,
        6: 0.006892444970205247,
    }
    for n, gap in gap_scan(0.5, 4, 6):
        assert gap == pytest.approx(frozen[n], abs=1e-9)
    with pytest.raises(DomainError):
        gap_scan(0.0, 4, 6)
    with pytest.raises(DomainError):
        gap_scan(0.5, 2, 6)
    with pytest.raises(DomainError):
        gap_scan(0.5, 6, 15)
    with pytest.raises(DomainError):
        gap_scan(0.5, 8, 6)


def test_adiabatic_time_estimate():
    out = adiabatic_time_estimate([(4, 0.5), (5, 0.1)])
    assert out[0] == (4, pytest.approx(4.0))
    assert out[1] == (5, pytest.approx(100.0))
    with pytest.raises(DomainError):
        adiabatic_time_estimate([(4, 0.0)])
    with pytest.raises(DomainError):
        adiabatic_time_estimate([(4, -1.0)])


def test_superposed_state_on_ghz_doublet():
    # (|00..0> + |11..1>)/sqrt2 and its partner recombine into a single
    # classical-looking branch
    n = 5
    plus = ghz_state(n)
    minus = StateVector(
        n,
        (basis_state(n, 0).amplitudes - basis_state(n, 2**n - 1).amplitudes)
        / np.sqrt(2),
    )
    cat = superposed_state(plus, minus)
    assert abs(abs(cat.amplitudes[0]) - 1.0) < 1e-12
    assert np.abs(cat.amplitudes[1:]).max() < 1e-12


def test_superposed_state_picks_positive_branch(solve_cache):
    pairs = solve_cache(8, 0.5, k=2)
    s = superposed_state(pairs.eigenvectors[0], pairs.eigenvectors[1])
    mz = mz_diagonal(8)
    probs = np.abs(s.amplitudes) ** 2
    mean = float(probs @ mz)
    assert mean == pytest.approx(7.71744692598982, abs=1e-8)
    assert probs[mz > 0].sum() > 0.999


def test_superposed_state_input_contracts():
    a = basis_state(3, 0)
    with pytest.raises(ContractError):
        superposed_state(a, a)  # not orthogonal
    with pytest.raises(DomainError):
        superposed_state(a, basis_state(4, 0))
    with pytest.raises(ContractError):
        superposed_state(StateVector(3, np.full(8, 0.5)), a)
