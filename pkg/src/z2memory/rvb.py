"""Nearest-neighbor valence-bond states on the periodic chain.

Two dimer coverings exist: bonds (1,2)(3,4)... and bonds (2,3)(4,5)...
closed by the wraparound pair.  Their equal superposition is a
rotation-invariant state whose two branches differ in a bilocal staggered
observable by an amount of order N, while every ring-distance >= 2
two-point correlation is checked numerically rather than assumed zero.

Conventions, fixed so every identity below is bit-exact:
  - singlet |i,j> = (|0_i 1_j> - |1_i 0_j>)/sqrt(2), first listed site first;
  - the even covering lists its wraparound pair as (1, N) in that order;
  - overlap of the two coverings: <VB2|VB1> = (-1/2)^(N/2-1), so the
    superposition normalizes by sqrt(2 + 2*(-1/2)^(N/2-1)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .macroscopicity import build_vcm
from .pauli import StateVector, expectation, two_point

RVB_MIN_SITES = 4
RVB_MAX_SITES = 14
CORRELATION_MAX_SITES = 12  # 9 * N^2 two-point evaluations, dense vectors


@dataclass(frozen=True)
class PairCovering:
    """Perfect matching of the N sites into N/2 disjoint pairs."""

    n_sites: int
    pairs: tuple

    def __post_init__(self):
        n = self.n_sites
        if not isinstance(n, (int, np.integer)) or n < RVB_MIN_SITES or n % 2:
            raise DomainError(f"coverings need an even site count >= {RVB_MIN_SITES}")
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        seen: set[int] = set()
        for i, j in pairs:
            if not (1 <= i <= n and 1 <= j <= n) or i == j:
                raise DomainError(f"invalid pair ({i}, {j}) on {n} sites")
            seen.update((i, j))
        if len(seen) != n or len(pairs) != n // 2:
            raise DomainError("pairs must be disjoint and cover every site")
        object.__setattr__(self, "n_sites", int(n))
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def odd_bonds(cls, n_sites: int) -> "PairCovering":
        """Pairs (1,2), (3,4), ..., (N-1,N)."""
        return cls(n_sites, tuple((l, l + 1) for l in range(1, n_sites, 2)))

    @classmethod
    def even_bonds(cls, n_sites: int) -> "PairCovering":
        """Pairs (2,3), (4,5), ..., (N-2,N-1) plus the wraparound (1,N)."""
        inner = tuple((l, l + 1) for l in range(2, n_sites - 1, 2))
        return cls(n_sites, inner + ((1, n_sites),))


def _site_bits(n: int, site: int) -> np.ndarray:
    # site l lives in bit n-l of the basis index (site 1 most significant)
    return (np.arange(1 << n) >> (n - site)) & 1


def build_vb(covering: PairCovering) -> StateVector:
    """Normalized product of singlets over a pair covering."""
    if not isinstance(covering, PairCovering):
        raise DomainError("build_vb expects a PairCovering")
    n = covering.n_sites
    amps = np.ones(1 << n)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i, j in covering.pairs:
        bi = _site_bits(n, i)
        bj = _site_bits(n, j)
        factor = np.zeros(amps.size)
        factor[(bi == 0) & (bj == 1)] = inv_sqrt2
        factor[(bi == 1) & (bj == 0)] = -inv_sqrt2
        amps *= factor
    return StateVector(n, amps.astype(np.complex128))


def build_rvb(n: int) -> StateVector:
    """Equal superposition of the two nearest-neighbor coverings,
    normalized exactly through the covering overlap."""
    if not isinstance(n, (int, np.integer)) or n % 2:
        raise DomainError(f"site count must be even, got {n!r}")
    if not RVB_MIN_SITES <= n <= RVB_MAX_SITES:
        raise DomainError(
            f"site count must lie in {RVB_MIN_SITES}..{RVB_MAX_SITES}, got {n}"
        )
    v1 = build_vb(PairCovering.odd_bonds(n))
    v2 = build_vb(PairCovering.even_bonds(n))
    norm_sq = 2.0 + 2.0 * (-0.5) ** (n // 2 - 1)
    amps = (v1.amplitudes + v2.amplitudes) / np.sqrt(norm_sq)
    return StateVector(n, amps)


def singlet_projector_apply(state: StateVector, l: int) -> StateVector:
    """Projector onto the singlet of sites (l, l+1) applied to a state;
    the bond at l = N wraps to (N, 1).  Output is unnormalized."""
    n = state.n_sites
    if not 1 <= l <= n:
        raise DomainError(f"bond site {l} out of range 1..{n}")
    m = 1 if l == n else l + 1
    amps = state.amplitudes
    idx = np.arange(amps.size)
    bl = (idx >> (n - l)) & 1
    bm = (idx >> (n - m)) & 1
    idx01 = idx[(bl == 0) & (bm == 1)]
    idx10 = idx01 ^ ((1 << (n - l)) | (1 << (n - m)))
    out = np.zeros_like(amps)
    d = 0.5 * (amps[idx01] - amps[idx10])
    out[idx01] = d
    out[idx10] = -d
    return StateVector(n, out)


def t_operator_apply(state: StateVector) -> StateVector:
    """Staggered sum of bond singlet projectors, sum_l (-1)^l t(l, l+1)."""
    n = state.n_sites
    if n % 2:
        raise DomainError("the staggered bond sum needs an even ring")
    acc = np.zeros(state.dim, dtype=np.complex128)
    for l in range(1, n + 1):
        sign = -1.0 if l % 2 else 1.0
        acc += sign * singlet_projector_apply(state, l).amplitudes
    return StateVector(n, acc)


def t_operator_moments(n: int) -> tuple[float, float]:
    """Mean and variance of the staggered bond observable in the
    superposed covering state."""
    psi = build_rvb(n)
    tpsi = t_operator_apply(psi)
    mean = float(np.vdot(psi.amplitudes, tpsi.amplitudes).real)
    second = float(np.vdot(tpsi.amplitudes, tpsi.amplitudes).real)
    return mean, second - mean * mean


def _check_correlation_range(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n % 2:
        raise DomainError(f"site count must be even, got {n!r}")
    if not RVB_MIN_SITES <= n <= CORRELATION_MAX_SITES:
        raise DomainError(
            f"site count must lie in {RVB_MIN_SITES}..{CORRELATION_MAX_SITES}, got {n}"
        )


def connected_correlation_scan(n: int) -> float:
    """Largest |<s_a(l) s_b(m)> - <s_a(l)><s_b(m)>| over all axis pairs and
    all site pairs at ring distance >= 2 in the superposed covering state."""
    _check_correlation_range(n)
    psi = build_rvb(n)
    singles = np.array(
        [[expectation(psi, axis, l) for l in range(1, n + 1)] for axis in range(3)]
    )
    worst = 0.0
    for l in range(1, n + 1):
        for m in range(l + 1, n + 1):
            if min(m - l, n - (m - l)) < 2:
                continue
            for a in range(3):
                for b in range(3):
                    c = two_point(psi, a, l, b, m) - singles[a, l - 1] * singles[b, m - 1]
                    worst = max(worst, abs(c))
    return worst


def rvb_vcm_check(n: int) -> float:
    """e1 of the correlation matrix of the superposed covering state."""
    _check_correlation_range(n)
    return build_vcm(build_rvb(n)).e1


def iterated_swap_residual(n: int) -> float:
    """Max-abs residual of rebuilding the even covering from the odd one by
    projecting every even bond and rescaling by (-2)^(N/2-1)."""
    if not isinstance(n, (int, np.integer)) or n % 2 or not RVB_MIN_SITES <= n <= RVB_MAX_SITES:
        raise DomainError(f"need an even site count in {RVB_MIN_SITES}..{RVB_MAX_SITES}")
    current = build_vb(PairCovering.odd_bonds(n))
    for l in range(2, n + 1, 2):
        current = singlet_projector_apply(current, l)
    target = build_vb(PairCovering.even_bonds(n))
    scale = (-2.0) ** (n // 2 - 1)
    return float(np.abs(scale * current.amplitudes - target.amplitudes).max())
