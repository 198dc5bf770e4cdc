"""Level-varying block tridiagonal matrices.

Truncation to dense form with the canonical (level, phase) flat indexing,
structural validation (rank, symmetrization and commutation identities), and
truncated propagators: matrix powers and the uniformized exponential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError, NumericError
from .families import FamilySpec, BlockCoefficients, block_coefficients, norm_diagonal


def flat_index(n: int, k: int) -> int:
    """Flat position of state (level n, phase k); levels are laid out in order."""
    return n * (n + 1) // 2 + k


def unflatten(i: int) -> tuple[int, int]:
    """Inverse of flat_index."""
    n = int((np.sqrt(8 * i + 1) - 1) / 2)
    # guard against floating point at triangular-number boundaries
    while n * (n + 1) // 2 > i:
        n -= 1
    while (n + 1) * (n + 2) // 2 <= i:
        n += 1
    return n, i - n * (n + 1) // 2


def truncation_size(N: int) -> int:
    """Number of states in levels 0..N."""
    return (N + 1) * (N + 2) // 2


@dataclass(frozen=True)
class BlockTridiagonal:
    """Blocks (A_n, B_n, C_n) for levels n = 0..N along one axis."""

    levels: int  # N + 1
    blocks: tuple[BlockCoefficients, ...]

    def __post_init__(self):
        if len(self.blocks) != self.levels:
            raise UsageError("levels does not match number of stored blocks")


@dataclass(frozen=True)
class DenseTruncation:
    """Hard-cut dense truncation of a block tridiagonal operator.

    The coupling from level N to N+1 is dropped, which keeps stochastic
    operators substochastic.
    """

    N: int
    entries: np.ndarray

    @property
    def size(self) -> int:
        return truncation_size(self.N)

    def as_dict(self) -> dict:
        return {
            "size": self.size,
            "entries": self.entries.ravel().tolist(),
            "index_map": [[n, k] for n, k in (unflatten(i) for i in range(self.size))],
        }


def build_axis(spec: FamilySpec, N: int, axis: int) -> BlockTridiagonal:
    """Closed-form block bands of J_axis for levels 0..N."""
    blocks = tuple(block_coefficients(spec, n, axis) for n in range(N + 1))
    return BlockTridiagonal(levels=N + 1, blocks=blocks)


def truncate(J: BlockTridiagonal, N: int) -> DenseTruncation:
    """Dense matrix of levels 0..N; blocks coupling level N upward are dropped."""
    if N > J.levels - 1:
        raise UsageError(f"truncation N={N} exceeds stored levels {J.levels - 1}")
    size = truncation_size(N)
    M = np.zeros((size, size))
    for n in range(N + 1):
        blk = J.blocks[n]
        r0 = flat_index(n, 0)
        M[r0:r0 + n + 1, r0:r0 + n + 1] = blk.B
        if n < N:
            M[r0:r0 + n + 1, r0 + n + 1:r0 + 2 * n + 3] = blk.A
        if n > 0:
            M[r0:r0 + n + 1, r0 - n:r0] = blk.C
    return DenseTruncation(N=N, entries=M)


def combine_dense(spec: FamilySpec, tau: tuple[float, float], N: int) -> DenseTruncation:
    """Dense truncation of tau1 J_1 + tau2 J_2."""
    t1 = truncate(build_axis(spec, N, 1), N)
    t2 = truncate(build_axis(spec, N, 2), N)
    return DenseTruncation(N=N, entries=tau[0] * t1.entries + tau[1] * t2.entries)


# ---------------------------------------------------------------------------
# structural validation
# ---------------------------------------------------------------------------


def structural_checks(spec: FamilySpec, N: int, tol: float | None = None) -> dict:
    """Rank, symmetrization and commutation diagnostics on levels <= N.

    Returns a report dict with one entry per check carrying the measured
    residual (or smallest retained singular value) and a pass flag.
    """
    if N < 2:
        raise UsageError(f"structural checks need N >= 2, got {N}")
    J1 = build_axis(spec, N, 1)
    J2 = build_axis(spec, N, 2)
    pis = [norm_diagonal(spec, n).diag for n in range(N + 1)]

    # (i) rank conditions: each A_{n,i} and C_{n+1,i} has full rank n+1; the
    # vertical stacks over i have full rank n+2
    min_sv_single = np.inf
    min_sv_joint = np.inf
    max_sv = 0.0
    for n in range(N):
        A1, A2 = J1.blocks[n].A, J2.blocks[n].A
        Ct1, Ct2 = J1.blocks[n + 1].C.T, J2.blocks[n + 1].C.T
        for M in (A1, A2, Ct1, Ct2):
            sv = np.linalg.svd(M, compute_uv=False)
            max_sv = max(max_sv, sv[0])
            min_sv_single = min(min_sv_single, sv[n])  # rank n+1 required
        for stack in (np.vstack([A1, A2]), np.vstack([Ct1, Ct2])):
            sv = np.linalg.svd(stack, compute_uv=False)
            max_sv = max(max_sv, sv[0])
            min_sv_joint = min(min_sv_joint, sv[n + 1])  # rank n+2 required
    rank_tol = tol if tol is not None else 1e-8 * max_sv

    # (ii) Pi_{n-1} A_{n-1,i} = C_{n,i}^T Pi_n
    sym_cross = 0.0
    for n in range(1, N + 1):
        for J in (J1, J2):
            lhs = pis[n - 1][:, None] * J.blocks[n - 1].A
            rhs = J.blocks[n].C.T * pis[n][None, :]
            sym_cross = max(sym_cross, np.abs(lhs - rhs).max())

    # (iii) Pi_n B_{n,i} symmetric
    sym_diag = 0.0
    for n in range(N + 1):
        for J in (J1, J2):
            M = pis[n][:, None] * J.blocks[n].B
            sym_diag = max(sym_diag, np.abs(M - M.T).max())

    # (iv) commutation J1 J2 = J2 J1, checked on rows of levels <= N-2 where
    # the truncation cannot alter the product
    T1 = truncate(J1, N).entries
    T2 = truncate(J2, N).entries
    D = T1 @ T2 - T2 @ T1
    cut = truncation_size(N - 2)
    commutation = np.abs(D[:cut, :]).max()

    scale = max(1.0, max(float(p.max()) for p in pis))
    report = {
        "rank_min_singular_value": float(min_sv_single),
        "rank_min_joint_singular_value": float(min_sv_joint),
        "rank_tolerance": float(rank_tol),
        "rank_pass": bool(min(min_sv_single, min_sv_joint) > rank_tol),
        "symmetrization_cross_residual": float(sym_cross),
        "symmetrization_cross_pass": bool(sym_cross <= 1e-11 * scale),
        "symmetrization_diag_residual": float(sym_diag),
        "symmetrization_diag_pass": bool(sym_diag <= 1e-11 * scale),
        "commutation_residual": float(commutation),
        "commutation_pass": bool(commutation <= 1e-11),
    }
    report["all_pass"] = all(v for k, v in report.items() if k.endswith("_pass"))
    return report


# ---------------------------------------------------------------------------
# propagators
# ---------------------------------------------------------------------------


def propagator_power(M: DenseTruncation, n: int) -> DenseTruncation:
    """M^n by binary exponentiation."""
    if n < 0:
        raise UsageError(f"power n={n} must be >= 0")
    return DenseTruncation(N=M.N, entries=np.linalg.matrix_power(M.entries, n))


def propagator_exponential(M: DenseTruncation, t: float, tail: float = 1e-14) -> DenseTruncation:
    """e^{tM} by uniformization, valid for generator matrices.

    Writes M = lam (K - I) with lam the largest diagonal magnitude and sums
    Poisson-weighted powers of the substochastic K until the Poisson tail
    drops below `tail`.
    """
    if t < 0:
        raise UsageError(f"time t={t} must be >= 0")
    A = M.entries
    off = A - np.diag(np.diag(A))
    if off.min() < -1e-12:
        raise UsageError("exponential requested on a matrix with negative off-diagonal entries")
    if A.sum(axis=1).max() > 1e-10:
        raise UsageError("exponential requested on a matrix with positive row sums")
    lam = float(np.abs(np.diag(A)).max())
    if lam == 0.0 or t == 0.0:
        return DenseTruncation(N=M.N, entries=np.eye(A.shape[0]))
    K = A / lam + np.eye(A.shape[0])
    mu = lam * t
    # Poisson(mu) weights by forward recursion
    result = np.zeros_like(A)
    term = np.eye(A.shape[0])
    weight = np.exp(-mu)
    acc = weight
    result += weight * term
    m = 0
    max_terms = int(mu + 40.0 * np.sqrt(mu + 1.0) + 100)
    while 1.0 - acc > tail:
        m += 1
        if m > max_terms:
            raise NumericError(f"uniformization did not converge after {max_terms} terms")
        term = term @ K
        weight *= mu / m
        acc += weight
        result += weight * term
    return DenseTruncation(N=M.N, entries=result)
