"""Stochastic block LU factorization of the triangle chain and urn tables.

J_2 = J_L J_U with pure-death lower factor (blocks S_n, R_n) and pure-birth
upper factor (blocks Y_n, X_n), all stochastic for nonnegative parameters.
The UL variant reuses the same element formulas with beta replaced by
beta - 1.  Urn transition tables for the product Jacobi, parabolic and
composed triangle experiments are generated and checked against the block
coefficients they must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError
from .families import (
    FamilySpec,
    PRODUCT_JACOBI,
    PARABOLIC,
    TRIANGLE01,
    block_coefficients,
    diagonal_bands,
    tridiagonal_bands,
)
from .orthopoly import jacobi_chain


@dataclass(frozen=True)
class LUFactors:
    """Banded factor blocks X_n, Y_n, S_n, R_n for levels 0..N."""

    N: int
    X: tuple[np.ndarray, ...]  # (n+1) x (n+2), upper bidiagonal
    Y: tuple[np.ndarray, ...]  # (n+1) x (n+1), upper bidiagonal
    S: tuple[np.ndarray, ...]  # (n+1) x (n+1), lower bidiagonal
    R: tuple[np.ndarray, ...]  # (n+1) x n, diagonal plus subdiagonal


def _lu_bands(al: float, be: float, ga: float, n: int):
    k = np.arange(n + 1, dtype=float)
    s = al + be + ga
    d3 = (2 * n + s + 3.0) * (be + ga + 2 * k + 2.0)
    d2 = (2 * n + s + 2.0) * (be + ga + 2 * k + 1.0)
    x2 = (n - k + al + 1.0) * (be + k + 1.0) / d3
    x3 = (n + k + s + 3.0) * (ga + k + 1.0) / d3
    y2 = (n + k + be + ga + 2.0) * (be + k + 1.0) / d3
    y3 = (n - k) * (ga + k + 1.0) / d3
    s1 = k * (n - k + al + 1.0) / d2
    s2 = (n + k + s + 2.0) * (be + ga + k + 1.0) / d2
    r1 = k * (n + k + be + ga + 1.0) / d2
    r2 = (n - k) * (be + ga + k + 1.0) / d2
    return x2, x3, y2, y3, s1, s2, r1, r2


def triangle_lu(alpha: float, beta: float, gamma: float, N: int) -> LUFactors:
    """Closed-form factor blocks of the triangle chain normalized at (0,1)."""
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if not v > -1.0:
            raise DomainError(f"parameter {name}={v} must be > -1")
    Xs, Ys, Ss, Rs = [], [], [], []
    for n in range(N + 1):
        x2, x3, y2, y3, s1, s2, r1, r2 = _lu_bands(alpha, beta, gamma, n)
        k = np.arange(n + 1)
        X = np.zeros((n + 1, n + 2))
        X[k, k] = x2
        X[k, k + 1] = x3
        Y = np.zeros((n + 1, n + 1))
        Y[k, k] = y2
        Y[k[:-1], k[:-1] + 1] = y3[:-1]
        S = np.zeros((n + 1, n + 1))
        S[k, k] = s2
        S[k[1:], k[1:] - 1] = s1[1:]
        R = np.zeros((n + 1, n))
        if n >= 1:
            R[k[:-1], k[:-1]] = r2[:-1]
            R[k[1:], k[1:] - 1] = r1[1:]
        Xs.append(X)
        Ys.append(Y)
        Ss.append(S)
        Rs.append(R)
    return LUFactors(N=N, X=tuple(Xs), Y=tuple(Ys), S=tuple(Ss), R=tuple(Rs))


def verify_factorization(alpha: float, beta: float, gamma: float, N: int,
                         mode: str = "LU") -> dict:
    """Residual report of the factor identities against the J_2 blocks.

    mode "LU" checks A = S X, B = R X' + S Y, C = R Y' with same-parameter
    factors; mode "UL-shift" builds the factors with beta - 1 and multiplies
    in the opposite order, an ordering convention that is only verified
    numerically, so the report flags rather than asserts.
    """
    if N < 2:
        raise UsageError(f"verification needs N >= 2, got {N}")
    spec = FamilySpec(TRIANGLE01, (alpha, beta, gamma))
    if mode == "LU":
        fac = triangle_lu(alpha, beta, gamma, N)
        res_a = res_b = res_c = 0.0
        for n in range(N + 1):
            blk = block_coefficients(spec, n, 2)
            res_a = max(res_a, np.abs(blk.A - fac.S[n] @ fac.X[n]).max())
            b = fac.S[n] @ fac.Y[n]
            if n >= 1:
                b = b + fac.R[n] @ fac.X[n - 1]
                res_c = max(res_c, np.abs(blk.C - fac.R[n] @ fac.Y[n - 1]).max())
            res_b = max(res_b, np.abs(blk.B - b).max())
        worst = max(res_a, res_b, res_c)
        return {"mode": "LU", "residual_A": res_a, "residual_B": res_b,
                "residual_C": res_c, "max_residual": worst, "pass": worst <= 1e-12}
    if mode != "UL-shift":
        raise UsageError(f"unknown mode {mode!r}")
    if not beta - 1.0 > -1.0:
        raise DomainError(f"UL shift needs beta > 0, got beta={beta}")
    fac = triangle_lu(alpha, beta - 1.0, gamma, N)
    # product in the reversed order: block row n of the upper factor times
    # the lower factor gives A = X_n S_{n+1}, B = Y_n S_n + X_n R_{n+1},
    # C = Y_n R_n
    worst = 0.0
    for n in range(N):
        blk = block_coefficients(spec, n, 2)
        worst = max(worst, np.abs(blk.A - fac.X[n] @ fac.S[n + 1]).max())
        b = fac.Y[n] @ fac.S[n] + fac.X[n] @ fac.R[n + 1]
        worst = max(worst, np.abs(blk.B - b).max())
        if n >= 1:
            worst = max(worst, np.abs(blk.C - fac.Y[n] @ fac.R[n]).max())
    return {"mode": "UL-shift", "max_residual": worst, "pass": worst <= 1e-10,
            "note": "multiplication order and boundary shapes for the UL variant "
                    "are a numerical hypothesis, not an asserted identity"}


# ---------------------------------------------------------------------------
# urn transition tables
# ---------------------------------------------------------------------------

URN_KINDS = ("ProductJacobiUrn", "ParabolicUrn", "TriangleComposed")


def urn_table(kind: str, params: dict, n: int, k: int) -> dict[tuple[int, int], float]:
    """Urn transition probabilities from state (n, k), keyed by (dlevel, dphase)."""
    if kind not in URN_KINDS:
        raise UsageError(f"unknown urn kind {kind!r}")
    if not (n >= 0 and 0 <= k <= n):
        raise UsageError(f"phase k={k} out of range at level n={n}")
    if kind == "ProductJacobiUrn":
        al, be, ga, de = (params[p] for p in ("alpha", "beta", "gamma", "delta"))
        tau = params["tau"]
        cx = jacobi_chain(al, be, n - k)
        cy = jacobi_chain(ga, de, k)
        return {
            (+1, 0): tau * cx.a,
            (-1, 0): tau * cx.c,
            (+1, +1): (1.0 - tau) * cy.a,
            (-1, -1): (1.0 - tau) * cy.c,
            (0, 0): tau * cx.b + (1.0 - tau) * cy.b,
        }
    if kind == "ParabolicUrn":
        spec = FamilySpec(PARABOLIC, (params["alpha"], params["beta"]))
        bands = tridiagonal_bands(spec, n)
        return {
            (0, -1): bands["b1"][k],
            (-1, -1): bands["c1"][k],
            (+1, +1): bands["a3"][k],
            (0, +1): bands["b3"][k],
        }
    # TriangleComposed: the nine products of a death move (S or R entry)
    # followed by a birth move (X or Y entry)
    al, be, ga = (params[p] for p in ("alpha", "beta", "gamma"))

    names = ("x2", "x3", "y2", "y3", "s1", "s2", "r1", "r2")

    def bv(n_, k_, which):
        # band validity: y3 and r2 stop at k = n-1, s1 and r1 start at k = 1
        if n_ < 0 or k_ < 0 or k_ > n_:
            return 0.0
        if which in ("y3", "r2") and k_ > n_ - 1:
            return 0.0
        if which in ("s1", "r1") and k_ < 1:
            return 0.0
        return float(_lu_bands(al, be, ga, n_)[names.index(which)][k_])

    s1 = bv(n, k, "s1")
    s2 = bv(n, k, "s2")
    r1 = bv(n, k, "r1")
    r2 = bv(n, k, "r2")
    # after an S move the X/Y entries are read at level n; after an R move
    # the level has dropped, so they are read at level n-1
    return {
        (+1, -1): s1 * bv(n, k - 1, "x2"),
        (+1, 0): s1 * bv(n, k - 1, "x3") + s2 * bv(n, k, "x2"),
        (+1, +1): s2 * bv(n, k, "x3"),
        (0, -1): s1 * bv(n, k - 1, "y2") + r1 * bv(n - 1, k - 1, "x2"),
        (0, 0): s1 * bv(n, k - 1, "y3") + s2 * bv(n, k, "y2")
                + r1 * bv(n - 1, k - 1, "x3") + r2 * bv(n - 1, k, "x2"),
        (0, +1): s2 * bv(n, k, "y3") + r2 * bv(n - 1, k, "x3"),
        (-1, -1): r1 * bv(n - 1, k - 1, "y2"),
        (-1, 0): r1 * bv(n - 1, k - 1, "y3") + r2 * bv(n - 1, k, "y2"),
        (-1, +1): r2 * bv(n - 1, k, "y3"),
    }


def urn_consistency_check(kind: str, params: dict, N: int) -> dict:
    """Max deviation between urn tables and the block coefficients they model."""
    if N < 2:
        raise UsageError(f"consistency check needs N >= 2, got {N}")
    worst = 0.0
    if kind == "ProductJacobiUrn":
        spec = FamilySpec(PRODUCT_JACOBI,
                          tuple(params[p] for p in ("alpha", "beta", "gamma", "delta")))
        tau = params["tau"]
    elif kind == "ParabolicUrn":
        spec = FamilySpec(PARABOLIC, (params["alpha"], params["beta"]))
    elif kind == "TriangleComposed":
        spec = FamilySpec(TRIANGLE01,
                          tuple(params[p] for p in ("alpha", "beta", "gamma")))
    else:
        raise UsageError(f"unknown urn kind {kind!r}")
    for n in range(N + 1):
        if kind == "ProductJacobiUrn":
            b1 = block_coefficients(spec, n, 1)
            b2 = block_coefficients(spec, n, 2)
            A = tau * b1.A + (1.0 - tau) * b2.A
            B = tau * b1.B + (1.0 - tau) * b2.B
            C = tau * b1.C + (1.0 - tau) * b2.C
        else:
            blk = block_coefficients(spec, n, 2)
            A, B, C = blk.A, blk.B, blk.C
        for k in range(n + 1):
            table = urn_table(kind, params, n, k)
            for (dn, dk), p in table.items():
                kk = k + dk
                if dn == +1:
                    ref = A[k, kk] if 0 <= kk <= n + 1 else 0.0
                elif dn == 0:
                    ref = B[k, kk] if 0 <= kk <= n else 0.0
                else:
                    ref = C[k, kk] if 0 <= kk <= n - 1 else 0.0
                worst = max(worst, abs(p - ref))
    return {"kind": kind, "max_abs_error": worst, "pass": worst <= 1e-12}
