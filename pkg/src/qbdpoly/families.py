"""The five bivariate model variants and their block recurrence data.

Each family is defined by a normalized weight on a planar domain (square,
quadrant, parabolic region, triangle) together with a mutually orthogonal
polynomial basis Q_{n,k} normalized to 1 at a corner of the domain.  This
module produces the closed-form block three-term-recurrence coefficients,
basis evaluations, closed-form norm diagonals, and Gaussian quadrature rules
on the domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, UsageError
from .orthopoly import (
    LAGUERRE_VARIANTS,
    jacobi_chain,
    jacobi_rec_abc,
    laguerre_chain,
    gauss_jacobi_rule,
    gauss_laguerre_rule,
)

PRODUCT_JACOBI = "product-jacobi"
PRODUCT_LAGUERRE = "product-laguerre"
PARABOLIC = "parabolic"
TRIANGLE01 = "triangle01"
TRIANGLE00 = "triangle00"

FAMILY_KINDS = (PRODUCT_JACOBI, PRODUCT_LAGUERRE, PARABOLIC, TRIANGLE01, TRIANGLE00)

PARAM_NAMES = {
    PRODUCT_JACOBI: ("alpha", "beta", "gamma", "delta"),
    PRODUCT_LAGUERRE: ("alpha", "beta"),
    PARABOLIC: ("alpha", "beta"),
    TRIANGLE01: ("alpha", "beta", "gamma"),
    TRIANGLE00: ("alpha", "beta", "gamma"),
}


@dataclass(frozen=True)
class FamilySpec:
    """A bivariate family plus its real parameters (all > -1).

    params are stored in the canonical order of PARAM_NAMES[kind]; the
    product-laguerre family additionally carries a normalization variant.
    """

    kind: str
    params: tuple[float, ...]
    variant: str | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise DomainError(f"unknown family kind {self.kind!r}")
        names = PARAM_NAMES[self.kind]
        if len(self.params) != len(names):
            raise DomainError(
                f"{self.kind} expects parameters {names}, got {len(self.params)} values"
            )
        for name, value in zip(names, self.params):
            if not value > -1.0:
                raise DomainError(f"parameter {name}={value} must be > -1")
        if self.kind == PRODUCT_LAGUERRE:
            variant = self.variant or "endpoint-binomial"
            if variant not in LAGUERRE_VARIANTS:
                raise DomainError(f"unknown Laguerre variant {variant!r}")
            object.__setattr__(self, "variant", variant)
        elif self.variant is not None:
            raise DomainError(f"{self.kind} does not take a variant")

    def __getitem__(self, name: str) -> float:
        return self.params[PARAM_NAMES[self.kind].index(name)]

    def as_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "params": dict(zip(PARAM_NAMES[self.kind], self.params)),
        }
        if self.variant is not None:
            doc["variant"] = self.variant
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "FamilySpec":
        kind = doc["kind"]
        if kind not in FAMILY_KINDS:
            raise DomainError(f"unknown family kind {kind!r}")
        names = PARAM_NAMES[kind]
        raw = doc.get("params", {})
        missing = [n for n in names if n not in raw]
        if missing:
            raise DomainError(f"{kind} is missing parameters {missing}")
        params = tuple(float(raw[n]) for n in names)
        return cls(kind=kind, params=params, variant=doc.get("variant"))


def family_spec(kind: str, variant: str | None = None, **params: float) -> FamilySpec:
    """Build a FamilySpec from named parameters."""
    names = PARAM_NAMES.get(kind)
    if names is None:
        raise DomainError(f"unknown family kind {kind!r}")
    missing = [n for n in names if n not in params]
    extra = [n for n in params if n not in names]
    if missing or extra:
        raise DomainError(f"{kind} takes parameters {names}; missing={missing} extra={extra}")
    return FamilySpec(kind=kind, params=tuple(float(params[n]) for n in names), variant=variant)


@dataclass(frozen=True)
class BlockCoefficients:
    """Blocks (A, B, C) of one axis of the three-term recurrence at one level.

    A is (n+1) x (n+2), B is (n+1) x (n+1), C is (n+1) x n (empty at n = 0).
    """

    level: int
    axis: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


@dataclass(frozen=True)
class NormBlock:
    """Diagonal of the norm matrix Pi_n (inverse squared norms)."""

    level: int
    diag: np.ndarray


@dataclass(frozen=True)
class QuadratureRule2D:
    nodes: np.ndarray  # (M, 2)
    weights: np.ndarray  # (M,)
    exactness_degree: int  # per substituted variable

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes[:, 0], self.nodes[:, 1])))


def _poch2(x):
    """Pochhammer (x)_2 = x (x + 1)."""
    return x * (x + 1.0)


# ---------------------------------------------------------------------------
# scalar coefficient bands
# ---------------------------------------------------------------------------


def correction_factor(beta: float, gamma: float, k) -> np.ndarray:
    """The triangle half-correction D_k = (1/2)(1 + (b^2-g^2)/((2k+b+g+2)(2k+b+g))).

    At k = 0 the general expression is 0/0 when beta + gamma = 0; the cancelled
    form (beta+1)/(beta+gamma+2) agrees with it whenever beta + gamma != 0 and
    is finite everywhere, so it is used at k = 0 unconditionally.
    """
    k = np.asarray(k, dtype=float)
    bg = beta + gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        general = 0.5 * (1.0 + (beta**2 - gamma**2) / ((2 * k + bg + 2.0) * (2 * k + bg)))
    return np.where(k == 0, (beta + 1.0) / (bg + 2.0), general)


def _zeros(n: int) -> dict[str, np.ndarray]:
    return {
        "a1": np.zeros(n + 1), "a2": np.zeros(n + 1), "a3": np.zeros(n + 1),
        "b1": np.zeros(n + 1), "b2": np.zeros(n + 1), "b3": np.zeros(n + 1),
        "c1": np.zeros(n + 1), "c2": np.zeros(n + 1), "c3": np.zeros(n + 1),
    }


def diagonal_bands(spec: FamilySpec, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Axis-1 scalar bands (a_k, b_k, c_k) at level n; positions [k,k] of A, B, C.

    c_k is reported for k = 0..n with c_n = 0 (the last row of C is empty).
    """
    k = np.arange(n + 1, dtype=float)
    if spec.kind == PRODUCT_JACOBI:
        chains = [jacobi_chain(spec["alpha"], spec["beta"], n - int(j)) for j in range(n + 1)]
        a = np.array([c.a for c in chains])
        b = np.array([c.b for c in chains])
        c = np.array([c.c for c in chains])
        c[-1] = 0.0
        return a, b, c
    if spec.kind == PRODUCT_LAGUERRE:
        chains = [laguerre_chain(spec["alpha"], n - int(j), spec.variant) for j in range(n + 1)]
        a = np.array([c.a for c in chains])
        b = np.array([c.b for c in chains])
        c = np.array([c.c for c in chains])
        c[-1] = 0.0
        return a, b, c
    if spec.kind == PARABOLIC:
        al, be = spec["alpha"], spec["beta"]
        p = al + be + 1.5
        a = (n - k + al + 1.0) * (n + p) / _poch2(2 * n - k + p)
        b = (n - k + 1.0) * (n - k + al + 1.0) / _poch2(2 * n - k + p) \
            + (n + p - 1.0) * (n + be + 0.5) / _poch2(2 * n - k + p - 1.0)
        c = (n - k) * (n + be + 0.5) / _poch2(2 * n - k + p - 1.0)
        c[-1] = 0.0
        return a, b, c
    # triangle01 and triangle00 share the same axis-1 formulas (they are
    # symmetric under beta <-> gamma).
    al, be, ga = spec["alpha"], spec["beta"], spec["gamma"]
    s = al + be + ga
    a = (n - k + al + 1.0) * (n + k + s + 2.0) / _poch2(2 * n + s + 2.0)
    c = (n - k) * (n + k + be + ga + 1.0) / _poch2(2 * n + s + 1.0)
    b = -(a + c)
    return a, b, c


def _triangle_tridiagonal_bands(al: float, be: float, ga: float, n: int) -> dict[str, np.ndarray]:
    """Axis-2 bands of the triangle family normalized at (0,1), raw formulas."""
    k = np.arange(n + 1, dtype=float)
    s = al + be + ga
    bg = be + ga
    d = correction_factor(be, ga, k)
    a, b, c = diagonal_bands(FamilySpec(TRIANGLE01, (al, be, ga)), n)
    bands = _zeros(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        bands["a1"] = np.where(
            k >= 1,
            _poch2(n - k + al + 1.0) * k * (k + be)
            / (_poch2(2 * n + s + 2.0) * _poch2(2 * k + bg)),
            0.0,
        )
        bands["b1"] = np.where(
            k >= 1,
            2.0 * k * (k + be) * (n - k + al + 1.0) * (n + k + bg + 1.0)
            / (_poch2(2 * k + bg) * (2 * n + s + 1.0) * (2 * n + s + 3.0)),
            0.0,
        )
        bands["c1"] = np.where(
            k >= 1,
            _poch2(n + k + bg) * (k + be) * k
            / (_poch2(2 * n + s + 1.0) * _poch2(2 * k + bg)),
            0.0,
        )
    bands["a2"] = d * a
    bands["b2"] = d * (1.0 + b)
    bands["c2"] = d * c
    bands["a3"] = _poch2(n + k + s + 2.0) * (k + ga + 1.0) * (k + bg + 1.0) \
        / (_poch2(2 * n + s + 2.0) * _poch2(2 * k + bg + 1.0))
    bands["b3"] = 2.0 * (n - k) * (n + k + s + 2.0) * (k + ga + 1.0) * (k + bg + 1.0) \
        / ((2 * n + s + 1.0) * (2 * n + s + 3.0) * _poch2(2 * k + bg + 1.0))
    bands["c3"] = np.where(
        k <= n - 2,
        _poch2(n - k - 1.0) * (k + bg + 1.0) * (k + ga + 1.0)
        / (_poch2(2 * n + s + 1.0) * _poch2(2 * k + bg + 1.0)),
        0.0,
    )
    # band validity masks (positions that do not exist in the block)
    bands["b3"][-1] = 0.0
    bands["c2"][-1] = 0.0
    return bands


def tridiagonal_bands(spec: FamilySpec, n: int) -> dict[str, np.ndarray]:
    """Axis-2 scalar bands at level n.

    Keys a1/a2/a3 fill positions [k,k-1]/[k,k]/[k,k+1] of A, and likewise
    b*/c* for B and C.  Entries at positions that fall outside a block are 0.
    """
    k = np.arange(n + 1, dtype=float)
    if spec.kind in (PRODUCT_JACOBI, PRODUCT_LAGUERRE):
        if spec.kind == PRODUCT_JACOBI:
            chains = [jacobi_chain(spec["gamma"], spec["delta"], int(j)) for j in range(n + 1)]
        else:
            chains = [laguerre_chain(spec["beta"], int(j), spec.variant) for j in range(n + 1)]
        bands = _zeros(n)
        bands["a3"] = np.array([c.a for c in chains])
        bands["b2"] = np.array([c.b for c in chains])
        bands["c1"] = np.array([c.c for c in chains])
        bands["c1"][0] = 0.0
        return bands
    if spec.kind == PARABOLIC:
        al, be = spec["alpha"], spec["beta"]
        p = al + be + 1.5
        bands = _zeros(n)
        bands["a3"] = (k + 2 * be + 1.0) * (n + p) / ((2 * k + 2 * be + 1.0) * (2 * n - k + p))
        bands["b1"] = k * (n - k + al + 1.0) / ((2 * k + 2 * be + 1.0) * (2 * n - k + p))
        bands["b3"] = (k + 2 * be + 1.0) * (n - k) / ((2 * k + 2 * be + 1.0) * (2 * n - k + p))
        bands["b3"][-1] = 0.0
        bands["c1"] = k * (n + be + 0.5) / ((2 * k + 2 * be + 1.0) * (2 * n - k + p))
        return bands
    if spec.kind == TRIANGLE01:
        return _triangle_tridiagonal_bands(spec["alpha"], spec["beta"], spec["gamma"], n)
    # triangle00: swap beta <-> gamma everywhere, then rebuild the middle
    # diagonal (a2, b2, c2) with a minus sign and the correction factor in the
    # original (unswapped) parameter order.
    al, be, ga = spec["alpha"], spec["beta"], spec["gamma"]
    bands = _triangle_tridiagonal_bands(al, ga, be, n)
    d = correction_factor(be, ga, k)
    a, b, c = diagonal_bands(spec, n)
    bands["a2"] = -d * a
    bands["b2"] = -d * (1.0 + b)
    bands["c2"] = -d * c
    bands["c2"][-1] = 0.0
    return bands


def block_coefficients(spec: FamilySpec, n: int, axis: int) -> BlockCoefficients:
    """Dense closed-form blocks (A_{n,axis}, B_{n,axis}, C_{n,axis})."""
    if n < 0:
        raise DomainError(f"level n={n} must be >= 0")
    if axis not in (1, 2):
        raise UsageError(f"axis must be 1 or 2, got {axis}")
    A = np.zeros((n + 1, n + 2))
    B = np.zeros((n + 1, n + 1))
    C = np.zeros((n + 1, n))
    k = np.arange(n + 1)
    if axis == 1:
        a, b, c = diagonal_bands(spec, n)
        A[k, k] = a
        B[k, k] = b
        C[k[:-1], k[:-1]] = c[:-1]
    else:
        bands = tridiagonal_bands(spec, n)
        A[k[1:], k[1:] - 1] = bands["a1"][1:]
        A[k, k] = bands["a2"]
        A[k, k + 1] = bands["a3"]
        B[k[1:], k[1:] - 1] = bands["b1"][1:]
        B[k, k] = bands["b2"]
        B[k[:-1], k[:-1] + 1] = bands["b3"][:-1]
        if n >= 1:
            C[k[1:], k[1:] - 1] = bands["c1"][1:]
            C[k[:-1], k[:-1]] = bands["c2"][:-1]
        if n >= 2:
            C[k[:-2], k[:-2] + 1] = bands["c3"][:-2]
    return BlockCoefficients(level=n, axis=axis, A=A, B=B, C=C)


# ---------------------------------------------------------------------------
# basis evaluation
# ---------------------------------------------------------------------------


def _std_jacobi_seq(a: float, b: float, nmax: int, t: np.ndarray) -> list[np.ndarray]:
    """P_0 .. P_nmax of the standard Jacobi family, by forward recurrence."""
    seq = [np.ones_like(t)]
    if nmax == 0:
        return seq
    prev = np.zeros_like(t)
    cur = seq[0]
    for m in range(nmax):
        A, B, C = jacobi_rec_abc(a, b, m)
        cur, prev = ((t - B) * cur - C * prev) / A, cur
        seq.append(cur)
    return seq


def _parabolic_scaled_seq(be: float, kmax: int, x: np.ndarray, y: np.ndarray) -> list[np.ndarray]:
    """G_k = x^{k/2} P_k^{(be,be)}(y / sqrt(x)), a true bivariate polynomial.

    Built from the symmetric-Jacobi recurrence multiplied through by powers of
    sqrt(x): y G_k = A_k G_{k+1} + C_k x G_{k-1}.
    """
    seq = [np.ones_like(x)]
    if kmax == 0:
        return seq
    prev = np.zeros_like(x)
    cur = seq[0]
    for m in range(kmax):
        A, _, C = jacobi_rec_abc(be, be, m)
        cur, prev = (y * cur - C * x * prev) / A, cur
        seq.append(cur)
    return seq


def _triangle_scaled_seq(ga: float, be: float, kmax: int, x: np.ndarray, y: np.ndarray) -> list[np.ndarray]:
    """H_k = (1-x)^k P_k^{(ga,be)}(2y/(1-x) - 1), a true bivariate polynomial."""
    seq = [np.ones_like(x)]
    if kmax == 0:
        return seq
    one_minus_x = 1.0 - x
    prev = np.zeros_like(x)
    cur = seq[0]
    for m in range(kmax):
        A, B, C = jacobi_rec_abc(ga, be, m)
        cur, prev = ((2.0 * y - one_minus_x * (1.0 + B)) * cur
                     - C * one_minus_x**2 * prev) / A, cur
        seq.append(cur)
    return seq


def _lnpoch(a: float, m) -> np.ndarray:
    """log (a)_m for a > 0."""
    m = np.asarray(m, dtype=float)
    return gammaln(a + m) - gammaln(a)


def eval_basis(spec: FamilySpec, n: int, x, y) -> np.ndarray:
    """Evaluate the normalized basis vector Q_n = (Q_{n,0}, ..., Q_{n,n}).

    Returns an array of shape (n+1,) + broadcast shape of (x, y).
    """
    if n < 0:
        raise DomainError(f"level n={n} must be >= 0")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if spec.kind == PRODUCT_JACOBI:
        px = _unit_jacobi_seq(spec["alpha"], spec["beta"], n, x)
        qy = _unit_jacobi_seq(spec["gamma"], spec["delta"], n, y)
        return np.stack([px[n - k] * qy[k] for k in range(n + 1)])
    if spec.kind == PRODUCT_LAGUERRE:
        px = _laguerre_seq(spec["alpha"], n, x, spec.variant)
        qy = _laguerre_seq(spec["beta"], n, y, spec.variant)
        return np.stack([px[n - k] * qy[k] for k in range(n + 1)])
    if spec.kind == PARABOLIC:
        al, be = spec["alpha"], spec["beta"]
        g = _parabolic_scaled_seq(be, n, x, y)
        rows = []
        for k in range(n + 1):
            pk = _std_jacobi_seq(al, be + k + 0.5, n - k, 2.0 * x - 1.0)[n - k]
            lnsig = _lnpoch(al + 1.0, n - k) - gammaln(n - k + 1.0) \
                + _lnpoch(be + 1.0, k) - gammaln(k + 1.0)
            rows.append(pk * g[k] / np.exp(lnsig))
        return np.stack(rows)
    # triangle families
    al, be, ga = spec["alpha"], spec["beta"], spec["gamma"]
    h = _triangle_scaled_seq(ga, be, n, x, y)
    rows = []
    for k in range(n + 1):
        pk = _std_jacobi_seq(2 * k + be + ga + 1.0, al, n - k, 2.0 * x - 1.0)[n - k]
        if spec.kind == TRIANGLE01:
            sign = (-1.0) ** (n - k)
            lnsig = _lnpoch(al + 1.0, n - k) - gammaln(n - k + 1.0) \
                + _lnpoch(ga + 1.0, k) - gammaln(k + 1.0)
        else:
            sign = (-1.0) ** n
            lnsig = _lnpoch(al + 1.0, n - k) - gammaln(n - k + 1.0) \
                + _lnpoch(be + 1.0, k) - gammaln(k + 1.0)
        rows.append(pk * h[k] / (sign * np.exp(lnsig)))
    return np.stack(rows)


def _unit_jacobi_seq(al: float, be: float, nmax: int, t: np.ndarray) -> list[np.ndarray]:
    seq = [np.ones_like(t)]
    prev = np.zeros_like(t)
    cur = seq[0]
    for m in range(nmax):
        cm = jacobi_chain(al, be, m)
        cur, prev = ((t - cm.b) * cur - cm.c * prev) / cm.a, cur
        seq.append(cur)
    return seq


def _laguerre_seq(al: float, nmax: int, t: np.ndarray, variant: str) -> list[np.ndarray]:
    seq = [np.ones_like(t)]
    prev = np.zeros_like(t)
    cur = seq[0]
    for m in range(nmax):
        cm = laguerre_chain(al, m, variant)
        cur, prev = ((-t - cm.b) * cur - cm.c * prev) / cm.a, cur
        seq.append(cur)
    return seq


# ---------------------------------------------------------------------------
# closed-form norm diagonals
# ---------------------------------------------------------------------------


def _ln_shifted_pair(m: np.ndarray, s: float) -> np.ndarray:
    """log[(2m + s) * Gamma(m + s)] for m >= 0 and s > -1.

    At m = 0 the two factors may individually be negative; the product equals
    Gamma(s + 1), which is positive.
    """
    m = np.asarray(m, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        general = np.log(2 * m + s) + gammaln(m + s)
    return np.where(m == 0, gammaln(s + 1.0), general)


def norm_diagonal(spec: FamilySpec, n: int) -> NormBlock:
    """Diagonal of Pi_n from the per-family closed forms."""
    if n < 0:
        raise DomainError(f"level n={n} must be >= 0")
    k = np.arange(n + 1, dtype=float)
    m = n - k  # first-coordinate degree
    if spec.kind == PRODUCT_JACOBI:
        al, be, ga, de = spec.params
        ln_sigma = _lnpoch(be + 1.0, m) - gammaln(m + 1.0) + _lnpoch(de + 1.0, k) - gammaln(k + 1.0)
        lnC = gammaln(al + be + 2.0) + gammaln(ga + de + 2.0) \
            - gammaln(al + 1.0) - gammaln(be + 1.0) - gammaln(ga + 1.0) - gammaln(de + 1.0)
        ln_nu = lnC \
            + gammaln(m + al + 1.0) + gammaln(m + be + 1.0) \
            + gammaln(k + ga + 1.0) + gammaln(k + de + 1.0) \
            - _ln_shifted_pair(m, al + be + 1.0) - _ln_shifted_pair(k, ga + de + 1.0) \
            - gammaln(m + 1.0) - gammaln(k + 1.0)
        return NormBlock(level=n, diag=np.exp(2.0 * ln_sigma - ln_nu))
    if spec.kind == PRODUCT_LAGUERRE:
        al, be = spec.params
        ln_pi = gammaln(al + 1.0) + gammaln(be + 1.0) + gammaln(m + 1.0) + gammaln(k + 1.0) \
            - gammaln(m + al + 1.0) - gammaln(k + be + 1.0)
        if spec.variant == "endpoint-one":
            ln_sigma = _lnpoch(al + 1.0, m) - gammaln(m + 1.0) \
                + _lnpoch(be + 1.0, k) - gammaln(k + 1.0)
            ln_pi = ln_pi + 2.0 * ln_sigma
        return NormBlock(level=n, diag=np.exp(ln_pi))
    if spec.kind == PARABOLIC:
        al, be = spec.params
        p = al + be + 1.5
        # numerator pair (2n - k + p) Gamma(n + p) is positive; at n = 0 it
        # collapses to Gamma(p + 1)
        if n == 0:
            ln_pair = gammaln(p + 1.0) * np.ones(1)
        else:
            ln_pair = np.log(2 * n - k + p) + gammaln(n + p)
        ln_pi = 0.5 * np.log(np.pi) + _ln_shifted_pair(k, 2 * be + 1.0) + ln_pair \
            + gammaln(m + al + 1.0) \
            - (2 * be + 1.0) * np.log(2.0) - gammaln(n + be + 1.5) - gammaln(p + 1.0) \
            - gammaln(al + 1.0) - gammaln(be + 1.0) - gammaln(m + 1.0) - gammaln(k + 1.0)
        return NormBlock(level=n, diag=np.exp(ln_pi))
    # triangle families share nu; sigma differs by normalization corner
    al, be, ga = spec.params
    s = al + be + ga
    bg = be + ga
    # positive ratio groupings; each collapses to 1 at its degenerate index
    ln_r1 = (np.log(n + k + s + 2.0) - np.log(2 * n + s + 2.0)) if n >= 1 else np.zeros(1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ln_r2 = np.where(k == 0, 0.0, np.log(k + bg + 1.0) - np.log(2 * k + bg + 1.0))
    ln_nu = ln_r1 + ln_r2 \
        + _lnpoch(al + 1.0, m) + _lnpoch(be + 1.0, k) + _lnpoch(ga + 1.0, k) \
        + _lnpoch(bg + 2.0, n + k) \
        - gammaln(m + 1.0) - gammaln(k + 1.0) - _lnpoch(bg + 2.0, k) - _lnpoch(s + 3.0, n + k)
    second = ga if spec.kind == TRIANGLE01 else be
    ln_sigma = _lnpoch(al + 1.0, m) - gammaln(m + 1.0) + _lnpoch(second + 1.0, k) - gammaln(k + 1.0)
    return NormBlock(level=n, diag=np.exp(2.0 * ln_sigma - ln_nu))


# ---------------------------------------------------------------------------
# domain quadrature
# ---------------------------------------------------------------------------


def domain_quadrature(spec: FamilySpec, m: int) -> QuadratureRule2D:
    """Tensor Gauss rule on the family domain, exact for integrands that are
    polynomial of degree <= 2m - 1 in each substituted variable.

    Substitutions: parabolic region uses y = u sqrt(x); triangle uses
    y = (1 - x) v.  Weights of each 1D factor are normalized, so the 2D
    weights sum to 1.
    """
    if m < 1:
        raise DomainError(f"rule size m={m} must be >= 1")
    if spec.kind == PRODUCT_JACOBI:
        al, be, ga, de = spec.params
        rx = gauss_jacobi_rule(al, be, m)
        ry = gauss_jacobi_rule(ga, de, m)
        X, Y = np.meshgrid(rx.nodes, ry.nodes, indexing="ij")
    elif spec.kind == PRODUCT_LAGUERRE:
        al, be = spec.params
        rx = gauss_laguerre_rule(al, m)
        ry = gauss_laguerre_rule(be, m)
        X, Y = np.meshgrid(rx.nodes, ry.nodes, indexing="ij")
    elif spec.kind == PARABOLIC:
        al, be = spec.params
        rx = gauss_jacobi_rule(be + 0.5, al, m)
        ry = gauss_jacobi_rule(be, be, m)  # u = 2s - 1 on [-1, 1]
        X, S = np.meshgrid(rx.nodes, ry.nodes, indexing="ij")
        Y = (2.0 * S - 1.0) * np.sqrt(X)
    else:  # triangle families
        al, be, ga = spec.params
        rx = gauss_jacobi_rule(al, be + ga + 1.0, m)
        ry = gauss_jacobi_rule(be, ga, m)
        X, V = np.meshgrid(rx.nodes, ry.nodes, indexing="ij")
        Y = (1.0 - X) * V
    W = np.outer(rx.weights, ry.weights)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    return QuadratureRule2D(nodes=nodes, weights=W.ravel(), exactness_degree=2 * m - 1)
