"""Univariate Jacobi and Laguerre substrate.

Recurrence coefficients in birth-death "chain" form, Jacobi polynomial
evaluation by forward three-term recurrence, and Gaussian quadrature for the
normalized Beta and Gamma weights via the Golub-Welsch eigenvalue method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericError

LAGUERRE_VARIANTS = ("endpoint-binomial", "endpoint-one")


@dataclass(frozen=True)
class ChainCoefficients:
    """One row of a tridiagonal recurrence: up (a), stay (b), down (c)."""

    a: float
    b: float
    c: float


@dataclass(frozen=True)
class QuadratureRule1D:
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def _require_gt_minus_one(**params: float) -> None:
    for name, value in params.items():
        if not value > -1.0:
            raise DomainError(f"parameter {name}={value} must be > -1")


def jacobi_chain(alpha: float, beta: float, n: int) -> ChainCoefficients:
    """Recurrence coefficients of Jacobi polynomials on [0,1] with Q_n(1)=1.

    x Q_n = a_n Q_{n+1} + b_n Q_n + c_n Q_{n-1}, with a_n + b_n + c_n = 1.
    """
    _require_gt_minus_one(alpha=alpha, beta=beta)
    s = alpha + beta
    a = (n + beta + 1.0) * (n + s + 1.0) / ((2 * n + s + 1.0) * (2 * n + s + 2.0))
    if n == 0:
        c = 0.0
    else:
        c = n * (n + alpha) / ((2 * n + s) * (2 * n + s + 1.0))
    return ChainCoefficients(a=a, b=1.0 - a - c, c=c)


def laguerre_chain(alpha: float, n: int, variant: str = "endpoint-binomial") -> ChainCoefficients:
    """Recurrence coefficients of Laguerre polynomials, -x L_n = a L_{n+1} + b L_n + c L_{n-1}.

    The endpoint-binomial variant normalizes L_n(0) = binom(n+alpha, n); the
    endpoint-one variant normalizes L_n(0) = 1.  Both satisfy a + b + c = 0.
    """
    _require_gt_minus_one(alpha=alpha)
    if variant not in LAGUERRE_VARIANTS:
        raise DomainError(f"unknown Laguerre variant {variant!r}")
    b = -(2 * n + alpha + 1.0)
    if variant == "endpoint-binomial":
        return ChainCoefficients(a=n + 1.0, b=b, c=n + alpha)
    return ChainCoefficients(a=n + alpha + 1.0, b=b, c=float(n))


def jacobi_rec_abc(a: float, b: float, n: int) -> tuple[float, float, float]:
    """Forward recurrence t P_n = A P_{n+1} + B P_n + C P_{n-1} for standard
    Jacobi polynomials P_n^{(a,b)} on [-1,1].

    B_0 is evaluated through its cancelled form (b-a)/(a+b+2), which removes
    the 0/0 at a+b=0.
    """
    s = a + b
    A = 2.0 * (n + 1) * (n + s + 1.0) / ((2 * n + s + 1.0) * (2 * n + s + 2.0))
    if n == 0:
        # cancelled forms: the raw quotients are 0/0 at a+b=0, and C_0
        # multiplies P_{-1} = 0 anyway
        return A, (b - a) / (s + 2.0), 0.0
    B = (b * b - a * a) / ((2 * n + s) * (2 * n + s + 2.0))
    C = 2.0 * (n + a) * (n + b) / ((2 * n + s) * (2 * n + s + 1.0))
    return A, B, C


def eval_jacobi(alpha: float, beta: float, n: int, t, convention: str = "standard"):
    """Evaluate a Jacobi polynomial by forward three-term recurrence.

    convention="standard": P_n^{(alpha,beta)} on [-1,1], P_n(1) = binom(n+alpha, n).
    convention="unit-at-1": Q_n^{(alpha,beta)} on [0,1] with weight
    x^alpha (1-x)^beta and Q_n(1) = 1.
    """
    _require_gt_minus_one(alpha=alpha, beta=beta)
    if n < 0:
        raise DomainError(f"degree n={n} must be >= 0")
    t = np.asarray(t, dtype=float)
    pm1 = np.zeros_like(t)
    p = np.ones_like(t)
    if convention == "standard":
        for m in range(n):
            A, B, C = jacobi_rec_abc(alpha, beta, m)
            p, pm1 = ((t - B) * p - C * pm1) / A, p
    elif convention == "unit-at-1":
        for m in range(n):
            cm = jacobi_chain(alpha, beta, m)
            p, pm1 = ((t - cm.b) * p - cm.c * pm1) / cm.a, p
    else:
        raise DomainError(f"unknown convention {convention!r}")
    return p if p.ndim else float(p)


def eval_laguerre(alpha: float, n: int, t, variant: str = "endpoint-binomial"):
    """Evaluate a Laguerre polynomial by forward recurrence (both normalizations)."""
    _require_gt_minus_one(alpha=alpha)
    t = np.asarray(t, dtype=float)
    pm1 = np.zeros_like(t)
    p = np.ones_like(t)
    for m in range(n):
        cm = laguerre_chain(alpha, m, variant)
        p, pm1 = ((-t - cm.b) * p - cm.c * pm1) / cm.a, p
    return p if p.ndim else float(p)


def _golub_welsch(diag: np.ndarray, offdiag: np.ndarray, mass: float) -> tuple[np.ndarray, np.ndarray]:
    try:
        nodes, vectors = eigh_tridiagonal(diag, offdiag)
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise NumericError(f"Golub-Welsch eigensolver failed: {exc}") from exc
    weights = mass * vectors[0, :] ** 2
    return nodes, weights


def gauss_jacobi_rule(alpha: float, beta: float, m: int) -> QuadratureRule1D:
    """m-point Gauss rule for the normalized weight x^alpha (1-x)^beta on [0,1]."""
    _require_gt_minus_one(alpha=alpha, beta=beta)
    if m < 1:
        raise DomainError(f"rule size m={m} must be >= 1")
    chains = [jacobi_chain(alpha, beta, k) for k in range(m)]
    diag = np.array([c.b for c in chains])
    prod = np.array([chains[k].a * chains[k + 1].c for k in range(m - 1)])
    if np.any(prod <= 0):
        raise NumericError("non-positive a_n * c_{n+1}; symmetrization impossible")
    nodes, weights = _golub_welsch(diag, np.sqrt(prod), 1.0)
    return QuadratureRule1D(nodes=nodes, weights=weights, exactness_degree=2 * m - 1)


def gauss_laguerre_rule(alpha: float, m: int) -> QuadratureRule1D:
    """m-point Gauss rule for the normalized weight x^alpha e^{-x} on [0,inf)."""
    _require_gt_minus_one(alpha=alpha)
    if m < 1:
        raise DomainError(f"rule size m={m} must be >= 1")
    k = np.arange(m, dtype=float)
    diag = 2 * k + alpha + 1.0
    prod = (k[:-1] + 1.0) * (k[:-1] + 1.0 + alpha)
    nodes, weights = _golub_welsch(diag, np.sqrt(prod), 1.0)
    return QuadratureRule1D(nodes=nodes, weights=weights, exactness_degree=2 * m - 1)


def gauss_1d_rule(weight: str, m: int, **params: float) -> QuadratureRule1D:
    """Dispatch helper: weight is 'jacobi' (alpha, beta) or 'laguerre' (alpha)."""
    if weight == "jacobi":
        return gauss_jacobi_rule(params["alpha"], params["beta"], m)
    if weight == "laguerre":
        return gauss_laguerre_rule(params["alpha"], m)
    raise DomainError(f"unknown weight family {weight!r}")
