"""Thermal states of the chain and their commutator-based coherence matrix.

A mixed state has no variance-covariance route to macroscopic coherence;
the usable diagnostic is the Gram matrix of the commutators [rho, s_a(l)]
under the trace inner product.  Its largest eigenvalue e1 plays the role
the VCM spectrum plays for pure states: it bounds how strongly any
additive operator fails to commute with rho, collapses to zero on the
maximally mixed state, and reduces to twice the real part of the VCM on a
pure state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError
from .eigensolve import FullSpectrum, full_spectrum
from .macroscopicity import CorrelationKind, CorrelationMatrix
from .model import TfimHamiltonian, build_tfim
from .pauli import _apply_axis

TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
COMMUTE_TOL = 1e-8
_ROW_CACHE_BYTES = 64 * 1024 * 1024

DEFAULT_KT_MIN = 0.05
DEFAULT_KT_MAX = 2.0
DEFAULT_KT_POINTS = 40


@dataclass(frozen=True)
class GibbsState:
    """Thermal equilibrium density matrix of the chain at temperature kT.

    The constructor renormalizes the trace to exactly 1 and records the
    size of the correction; Hermiticity, positivity, and commutation with
    the Hamiltonian rebuilt from (n_sites, lam) are all verified here, so
    a constructed instance is safe to hand to the coherence analysis.
    """

    n_sites: int
    lam: float
    kT: float
    rho: np.ndarray
    trace_correction: float = field(init=False)

    def __post_init__(self):
        dim = 1 << self.n_sites
        mat = np.array(self.rho, dtype=np.complex128, copy=True)
        if mat.shape != (dim, dim):
            raise ContractError(f"rho has shape {mat.shape}, expected ({dim}, {dim})")
        tr = complex(np.trace(mat))
        if abs(tr.imag) > TRACE_TOL or not 0.5 < tr.real < 2.0:
            raise ContractError(f"trace {tr!r} is not a normalizable density trace")
        correction = abs(tr.real - 1.0)
        mat /= tr.real
        drift = float(np.abs(mat - mat.conj().T).max())
        if drift > HERMITICITY_TOL:
            raise ContractError(f"rho fails Hermiticity by {drift:.3e}")
        smallest = float(np.linalg.eigvalsh(mat)[0])
        if smallest < EIGENVALUE_FLOOR:
            raise ContractError(f"rho has negative eigenvalue {smallest:.3e}")
        h = build_tfim(self.n_sites, self.lam)
        h_rho = _left_apply(h, mat)
        # rho H = (H rho)^dagger for Hermitian factors
        commute = float(np.abs(h_rho - h_rho.conj().T).max())
        if commute > COMMUTE_TOL:
            raise ContractError(f"rho fails to commute with H by {commute:.3e}")
        mat.flags.writeable = False
        object.__setattr__(self, "rho", mat)
        object.__setattr__(self, "kT", float(self.kT))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "trace_correction", correction)

    def energy(self) -> float:
        """Tr(rho H) for the Hamiltonian this state was built against."""
        h = build_tfim(self.n_sites, self.lam)
        return float(np.trace(_left_apply(h, self.rho)).real)


def _left_apply(h: TfimHamiltonian, mat: np.ndarray) -> np.ndarray:
    """H @ mat, column by column through the matrix-free Hamiltonian."""
    out = np.empty_like(mat)
    for j in range(mat.shape[1]):
        out[:, j] = h.apply(mat[:, j])
    return out


def _check_temperature(kT: float) -> float:
    kT = float(kT)
    if not np.isfinite(kT) or kT <= 0.0:
        raise DomainError(f"temperature must be positive and finite, got {kT!r}")
    return kT


def gibbs_from_spectrum(spectrum: FullSpectrum, lam: float, kT: float) -> GibbsState:
    """Thermal state assembled from a precomputed eigendecomposition.

    Boltzmann weights are taken relative to the ground energy so nothing
    overflows; underflow of the highest levels is harmless and ignored.
    """
    kT = _check_temperature(kT)
    shifted = spectrum.eigenvalues - spectrum.eigenvalues[0]
    with np.errstate(under="ignore"):
        weights = np.exp(-shifted / kT)
    weights /= weights.sum()
    rho = (spectrum.basis * weights) @ spectrum.basis.T
    return GibbsState(
        n_sites=spectrum.n_sites, lam=lam, kT=kT, rho=rho.astype(np.complex128)
    )


def gibbs_state(h: TfimHamiltonian, kT: float) -> GibbsState:
    """Thermal equilibrium state e^(-H/kT)/Z of the chain Hamiltonian."""
    kT = _check_temperature(kT)
    return gibbs_from_spectrum(full_spectrum(h), h.lam, kT)


def build_w_matrix(rho: GibbsState) -> CorrelationMatrix:
    """Gram matrix of the commutators [rho, s_a(l)] in the trace inner
    product, eigen-decomposed descending.

    Entry (a,l),(b,m) equals Tr([rho, s_a(l)] [s_b(m), rho]).  The 3N
    commutator matrices are cached flat when they fit in a fixed byte
    budget, otherwise rebuilt blockwise.
    """
    mat = rho.rho
    n = rho.n_sites
    tr = complex(np.trace(mat))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ContractError(f"W needs a trace-1 density matrix, trace is {tr!r}")

    side = 3 * n
    dim = mat.shape[0]

    def commutator_flat(row: int) -> np.ndarray:
        site_index, axis = divmod(row, 3)
        a = _apply_axis(mat, n, axis, site_index + 1)  # sigma(row) @ rho
        return (a.conj().T - a).reshape(-1)  # [rho, sigma], anti-Hermitian

    bytes_per_row = dim * dim * 16
    if side * bytes_per_row <= _ROW_CACHE_BYTES:
        flat = np.empty((side, dim * dim), dtype=np.complex128)
        for r in range(side):
            flat[r] = commutator_flat(r)
        w = flat.conj() @ flat.T
    else:
        rows_per_block = max(1, _ROW_CACHE_BYTES // (2 * bytes_per_row))
        edges = list(range(0, side, rows_per_block)) + [side]
        w = np.empty((side, side), dtype=np.complex128)
        for bi in range(len(edges) - 1):
            i0, i1 = edges[bi], edges[bi + 1]
            fi = np.vstack([commutator_flat(r) for r in range(i0, i1)])
            for bj in range(bi, len(edges) - 1):
                j0, j1 = edges[bj], edges[bj + 1]
                fj = fi if bj == bi else np.vstack(
                    [commutator_flat(r) for r in range(j0, j1)]
                )
                block = fi.conj() @ fj.T
                w[i0:i1, j0:j1] = block
                if bj != bi:
                    w[j0:j1, i0:i1] = block.conj().T
    return CorrelationMatrix(n_sites=n, kind=CorrelationKind.W, entries=w)


def default_kt_grid(
    kt_min: float = DEFAULT_KT_MIN,
    kt_max: float = DEFAULT_KT_MAX,
    points: int = DEFAULT_KT_POINTS,
) -> np.ndarray:
    """Log-spaced temperature grid covering the low-T plateau and the decay."""
    if not 0.0 < kt_min < kt_max:
        raise DomainError("grid needs 0 < kt_min < kt_max")
    if points < 2:
        raise DomainError("grid needs at least 2 points")
    return np.geomspace(kt_min, kt_max, points)


def thermal_scan(lam: float, n: int, kT_grid=None) -> list[tuple[float, float]]:
    """e1 of the commutator Gram matrix across a temperature grid.

    One eigendecomposition of H is shared by every grid point.
    """
    if kT_grid is None:
        kT_grid = default_kt_grid()
    grid = np.asarray(kT_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("temperature grid must be a nonempty 1-d array")
    if np.any(grid <= 0.0) or not np.all(np.isfinite(grid)):
        raise DomainError("temperatures must be positive and finite")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("temperature grid must be strictly ascending")
    spectrum = full_spectrum(build_tfim(n, lam))
    out = []
    for kT in grid:
        g = gibbs_from_spectrum(spectrum, lam, float(kT))
        out.append((float(kT), build_w_matrix(g).e1))
    return out
