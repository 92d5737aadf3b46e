"""Lowest eigenpairs of the chain Hamiltonian, resolved by flip parity.

The Hamiltonian commutes with the global spin flip, and the two lowest
states form a doublet whose splitting closes exponentially in N below the
critical field.  A Krylov solver on the full space cannot tell such a pair
apart, so each flip-parity sector is solved on its own: the flip maps basis
index b to its bit complement, hence the half-space of indices below
2^(N-1) parameterizes either sector and the sector vectors are
(|b> +- |flipped b>)/sqrt(2).  Within a sector the low end of the spectrum
is well separated and a Lanczos iteration with full reorthogonalization
converges quickly; tiny sectors fall back to a dense solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CapabilityError, ContractError, ConvergenceError, DomainError
from .model import TfimHamiltonian, build_tfim
from .pauli import StateVector, mz_diagonal

MATVEC_BUDGET = 5000  # Hamiltonian applications allowed per eigenpair
RESIDUAL_BOUND = 1e-9  # ceiling on every reported residual
ORTHONORMALITY_TOL = 1e-9
DENSE_SECTOR_DIM = 8  # sectors at or below this dimension are solved densely
FULL_SPECTRUM_MAX_SITES = 10
SCAN_MAX_SITES = 14
_BREAKDOWN_EPS = 1e-13


def _embed(sector_vec: np.ndarray, sign: float) -> np.ndarray:
    """Lift a sector vector to the full space: (|b> + sign|flipped b>)/sqrt2."""
    return np.concatenate([sector_vec, sign * sector_vec[::-1]]) / np.sqrt(2.0)


def _restrict(full_vec: np.ndarray, sign: float) -> np.ndarray:
    half = full_vec.size // 2
    return (full_vec[:half] + sign * full_vec[half:][::-1]) / np.sqrt(2.0)


class _SectorOperator:
    """Hamiltonian restricted to one flip-parity sector, with a matvec count."""

    def __init__(self, h: TfimHamiltonian, sign: float) -> None:
        self.h = h
        self.sign = sign
        self.dim = h.dim // 2
        self.count = 0

    def matvec(self, s: np.ndarray) -> np.ndarray:
        self.count += 1
        return _restrict(self.h.apply(_embed(s, self.sign)), self.sign)


def _ritz_smallest(alphas: list[float], betas: list[float]) -> tuple[float, np.ndarray]:
    if len(alphas) == 1:
        return alphas[0], np.ones(1)
    vals, vecs = eigh_tridiagonal(
        np.asarray(alphas), np.asarray(betas), select="i", select_range=(0, 0)
    )
    return float(vals[0]), vecs[:, 0]


def _orthogonalize(v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    for _ in range(2):
        for u in basis:
            v = v - (u @ v) * u
    return v


def _lanczos_smallest(
    op: _SectorOperator,
    locked: list[np.ndarray],
    tol: float,
    rng: np.random.Generator,
    budget: int,
) -> np.ndarray:
    """One eigenvector at the bottom of the sector spectrum, deflated
    against ``locked``.  Raises ConvergenceError when the budget runs out."""
    start_count = op.count
    best_residual = np.inf
    scale = max(1.0, op.h.n_sites * (1.0 + abs(op.h.lam)))
    max_dim = op.dim - len(locked)

    while op.count - start_count < budget:
        v = rng.standard_normal(op.dim)
        v = _orthogonalize(v, locked)
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue  # bad draw, try again
        basis = [v / nv]
        alphas: list[float] = []
        betas: list[float] = []
        restart = False
        while not restart and op.count - start_count < budget and len(alphas) < max_dim:
            w = op.matvec(basis[-1])
            a = float(basis[-1] @ w)
            alphas.append(a)
            w = w - a * basis[-1]
            if betas:
                w = w - betas[-1] * basis[-2]
            w = _orthogonalize(w, locked)
            w = _orthogonalize(w, basis)
            b = float(np.linalg.norm(w))
            theta, s = _ritz_smallest(alphas, betas)
            broke_down = b <= _BREAKDOWN_EPS * scale
            estimate = abs(b * s[-1])
            if estimate < 0.5 * tol or broke_down:
                x = np.column_stack(basis) @ s
                x = _orthogonalize(x, locked)
                x /= np.linalg.norm(x)
                hx = op.matvec(x)
                rayleigh = float(x @ hx)
                residual = float(np.linalg.norm(hx - rayleigh * x))
                best_residual = min(best_residual, residual)
                if residual < tol:
                    return x
                if broke_down:
                    restart = True  # invariant subspace missed the target
            elif broke_down:
                restart = True
            if not restart:
                betas.append(b)
                basis.append(w / b)

    raise ConvergenceError(
        f"sector eigensolve exhausted {budget} matrix applications"
        f" (best residual {best_residual:.3e})",
        best_residual=None if not np.isfinite(best_residual) else best_residual,
    )


def _sector_lowest(op: _SectorOperator, count: int, tol: float) -> list[np.ndarray]:
    """The ``count`` lowest eigenvectors of one sector, orthonormal."""
    if op.dim <= DENSE_SECTOR_DIM:
        eye = np.eye(op.dim)
        mat = np.column_stack([op.matvec(eye[:, j]) for j in range(op.dim)])
        _, vecs = np.linalg.eigh((mat + mat.T) / 2.0)
        return [np.ascontiguousarray(vecs[:, j]) for j in range(count)]

    sector_tag = 0 if op.sign > 0 else 1
    lam_bits = int.from_bytes(np.float64(op.h.lam).tobytes(), "little")
    found: list[np.ndarray] = []
    for pair_index in range(count):
        rng = np.random.default_rng(
            (op.h.n_sites, sector_tag, pair_index, lam_bits)
        )
        found.append(_lanczos_smallest(op, found, tol, rng, MATVEC_BUDGET))
    return found


@dataclass(frozen=True)
class EigenPairs:
    """The k lowest eigenpairs: ascending eigenvalues, orthonormal
    eigenvectors, true residuals, and the flip-parity label of each vector."""

    eigenvalues: np.ndarray
    eigenvectors: tuple[StateVector, ...]
    residuals: np.ndarray
    parities: np.ndarray

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=np.float64, copy=True)
        res = np.array(self.residuals, dtype=np.float64, copy=True)
        par = np.array(self.parities, dtype=np.float64, copy=True)
        vecs = tuple(self.eigenvectors)
        k = vals.size
        if not (len(vecs) == k and res.size == k and par.size == k):
            raise ContractError("eigenpair fields disagree on the pair count")
        if np.any(np.diff(vals) < 0):
            raise ContractError("eigenvalues must be sorted ascending")
        if np.any(res >= RESIDUAL_BOUND):
            raise ContractError(
                f"residual {res.max():.3e} breaches the {RESIDUAL_BOUND:.0e} bound"
            )
        for i, vi in enumerate(vecs):
            for j in range(i, k):
                g = vi.inner(vecs[j])
                target = 1.0 if i == j else 0.0
                if abs(g - target) > ORTHONORMALITY_TOL:
                    raise ContractError(
                        f"eigenvectors {i},{j} fail orthonormality by {abs(g - target):.3e}"
                    )
        for arr in (vals, res, par):
            arr.flags.writeable = False
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)
        object.__setattr__(self, "residuals", res)
        object.__setattr__(self, "parities", par)

    @property
    def gap(self) -> float:
        if self.eigenvalues.size < 2:
            raise DomainError("gap needs at least two eigenpairs")
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def lowest_eigenpairs(h: TfimHamiltonian, k: int, tol: float = 1e-10) -> EigenPairs:
    """The k algebraically smallest eigenpairs of the chain Hamiltonian.

    Both flip-parity sectors are solved independently (dense below
    DENSE_SECTOR_DIM, otherwise Lanczos with full reorthogonalization and
    deflation) and the results merged, so both members of an exponentially
    split doublet are always found.  ``tol`` is the residual target;
    requests looser than the type bound are tightened to it.
    """
    if not 1 <= k <= 4:
        raise DomainError(f"k must lie in 1..4, got {k!r}")
    tol = float(tol)
    if not tol >= 1e-12:
        raise DomainError(f"tol must be at least 1e-12, got {tol!r}")
    target = min(tol, RESIDUAL_BOUND)

    merged: list[tuple[float, np.ndarray, float]] = []
    for sign in (1.0, -1.0):
        op = _SectorOperator(h, sign)
        for svec in _sector_lowest(op, min(k, op.dim), target):
            full = _embed(svec, sign)
            merged.append((float(full @ h.apply(full)), full, sign))

    merged.sort(key=lambda item: item[0])
    chosen = merged[:k]

    values = []
    vectors = []
    residuals = []
    parities = []
    for value, full, sign in chosen:
        hv = h.apply(full)
        residuals.append(float(np.linalg.norm(hv - value * full)))
        values.append(value)
        vectors.append(StateVector(h.n_sites, full.astype(np.complex128)))
        parities.append(sign)
    return EigenPairs(
        eigenvalues=np.array(values),
        eigenvectors=tuple(vectors),
        residuals=np.array(residuals),
        parities=np.array(parities),
    )


@dataclass(frozen=True)
class FullSpectrum:
    """Complete eigendecomposition of the chain Hamiltonian.

    ``basis`` is real orthogonal with eigenvector j in column j (the
    Hamiltonian is real symmetric in the z basis).
    """

    n_sites: int
    eigenvalues: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=np.float64, copy=True)
        if vals.size != (1 << self.n_sites):
            raise ContractError("eigenvalue count must be 2^N")
        if np.any(np.diff(vals) < 0):
            raise ContractError("eigenvalues must be sorted ascending")
        # the Hamiltonian is traceless: every term is a non-identity Pauli string
        total = abs(float(vals.sum()))
        if total > 1e-8 * max(1.0, float(np.abs(vals).sum())):
            raise ContractError(f"spectrum sums to {total:.3e}, expected 0")
        basis = np.array(self.basis, dtype=np.float64, copy=True)
        if basis.shape != (vals.size, vals.size):
            raise ContractError("eigenvector basis has the wrong shape")
        vals.flags.writeable = False
        basis.flags.writeable = False
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "basis", basis)


def full_spectrum(h: TfimHamiltonian) -> FullSpectrum:
    """Dense eigendecomposition, feasible up to FULL_SPECTRUM_MAX_SITES."""
    if h.n_sites > FULL_SPECTRUM_MAX_SITES:
        raise CapabilityError(
            f"full spectra stop at {FULL_SPECTRUM_MAX_SITES} sites, got {h.n_sites}"
        )
    dim = h.dim
    eye = np.eye(dim)
    mat = np.column_stack([h.apply(eye[:, j]) for j in range(dim)])
    vals, vecs = np.linalg.eigh((mat + mat.T) / 2.0)
    return FullSpectrum(n_sites=h.n_sites, eigenvalues=vals, basis=vecs)


def gap_scan(
    lam: float, n_min: int, n_max: int, tol: float = 1e-10
) -> list[tuple[int, float]]:
    """Energy gap E1 - E0 for every chain length in [n_min, n_max]."""
    if lam == 0.0:
        raise DomainError("the gap closes exactly at zero field; scan needs lam != 0")
    if not 3 <= n_min <= n_max <= SCAN_MAX_SITES:
        raise DomainError(
            f"scan range must satisfy 3 <= n_min <= n_max <= {SCAN_MAX_SITES}"
        )
    out = []
    for n in range(n_min, n_max + 1):
        pairs = lowest_eigenpairs(build_tfim(n, lam), 2, tol)
        gap = pairs.gap
        if gap <= 0.0:
            raise ContractError(f"nonpositive gap {gap!r} at {n} sites")
        out.append((n, gap))
    return out


def _phase_fixed(amps: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the largest-magnitude amplitude is real
    positive."""
    i = int(np.argmax(np.abs(amps)))
    pivot = amps[i]
    return amps * (abs(pivot) / pivot)


def superposed_state(e0: StateVector, e1: StateVector) -> StateVector:
    """Equal-weight combination of two orthonormal states, signed to land on
    the positive-magnetization branch.

    Each input is phase-fixed (largest amplitude made real positive); the
    relative sign then maximizes |<Mz>|, with the positive branch preferred
    on a tie.  For a flip-parity doublet this concentrates the weight on
    one magnetization sign.
    """
    if e0.n_sites != e1.n_sites:
        raise DomainError("states disagree on the site count")
    e0.require_normalized(1e-8)
    e1.require_normalized(1e-8)
    overlap = abs(e0.inner(e1))
    if overlap > 1e-8:
        raise ContractError(f"inputs overlap by {overlap:.3e}, expected orthogonal")

    a0 = _phase_fixed(e0.amplitudes)
    a1 = _phase_fixed(e1.amplitudes)
    mz = mz_diagonal(e0.n_sites)
    diag = 0.5 * (
        float(np.vdot(a0, mz * a0).real) + float(np.vdot(a1, mz * a1).real)
    )
    cross = float(np.vdot(a0, mz * a1).real)
    plus, minus = diag + cross, diag - cross
    scale = max(abs(plus), abs(minus), 1.0)
    if abs(abs(plus) - abs(minus)) <= 1e-8 * scale:
        # the branches tie (typical for a parity doublet): take the one
        # whose mean magnetization is nonnegative
        sign = 1.0 if plus >= minus else -1.0
    elif abs(plus) > abs(minus):
        sign = 1.0
    else:
        sign = -1.0
    sup = (a0 + sign * a1) / np.sqrt(2.0)
    sup /= np.linalg.norm(sup)
    return StateVector(e0.n_sites, sup)


def adiabatic_time_estimate(
    gaps: list[tuple[int, float]],
) -> list[tuple[int, float]]:
    """Operation-time estimate T = 1/gap^2 per chain length."""
    out = []
    for n, gap in gaps:
        gap = float(gap)
        if gap <= 0.0:
            raise DomainError(f"gap must be positive, got {gap!r} at n={n}")
        out.append((int(n), 1.0 / (gap * gap)))
    return out
