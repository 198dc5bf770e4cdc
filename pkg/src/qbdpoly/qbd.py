"""QBD models built from the block Jacobi matrices tau1 J_1 + tau2 J_2.

Admissible tau ranges (closed form and empirical scan), invariant measures by
two independent routes, killing deficits, stationarity residuals, and the
recurrence classification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UsageError, NumericError
from .families import (
    FamilySpec,
    PRODUCT_JACOBI,
    PRODUCT_LAGUERRE,
    PARABOLIC,
    TRIANGLE01,
    TRIANGLE00,
    block_coefficients,
    correction_factor,
    norm_diagonal,
)
from .blockmat import (
    DenseTruncation,
    build_axis,
    combine_dense,
    flat_index,
    truncate,
    truncation_size,
)

DISCRETE = "discrete"
CONTINUOUS = "continuous"

# which probabilistic kind each family can generate
FAMILY_KIND = {
    PRODUCT_JACOBI: DISCRETE,
    PRODUCT_LAGUERRE: CONTINUOUS,
    PARABOLIC: DISCRETE,
    TRIANGLE01: DISCRETE,
    TRIANGLE00: CONTINUOUS,
}

# discrete families fix tau2 as a function of tau1
_TAU2_RULE = {PRODUCT_JACOBI: "one-minus", PARABOLIC: "one-minus", TRIANGLE01: "one"}


@dataclass(frozen=True)
class TauBounds:
    """Admissible set of (tau1, tau2) for a family/kind combination.

    form "interval": tau1 in [lower, upper] with tau2 pinned by the family's
    rule; form "cone": tau1 >= 0 and tau2 >= 0; form "ratio": tau2 >= 0 and
    tau1 >= threshold * tau2.
    """

    form: str
    lower: float | None = None
    upper: float | None = None
    threshold: float | None = None
    tau2_rule: str | None = None
    description: str = ""

    def contains(self, tau: tuple[float, float], slack: float = 1e-12) -> bool:
        t1, t2 = tau
        if self.form == "interval":
            pinned = 1.0 - t1 if self.tau2_rule == "one-minus" else 1.0
            if abs(t2 - pinned) > slack:
                return False
            return self.lower - slack <= t1 <= self.upper + slack
        if self.form == "cone":
            return t1 >= -slack and t2 >= -slack
        if t2 < -slack:
            return False
        if t2 <= slack:
            return t1 >= -slack
        return t1 >= self.threshold * t2 - slack

    def as_dict(self) -> dict:
        doc = {"form": self.form, "description": self.description}
        for name in ("lower", "upper", "threshold", "tau2_rule"):
            value = getattr(self, name)
            if value is not None:
                doc[name] = value
        return doc


def _triangle01_upper(al: float, be: float, ga: float) -> float:
    """Upper tau bound for the triangle chain normalized at (0,1), six cases."""
    bg1 = be + ga + 1.0
    K = 1.0 - (al**2 - bg1**2) / (4.0 + (al + 3.0) * (al + bg1))
    if be**2 >= ga**2:
        if al < -bg1:
            return K / 2.0
        if al**2 <= bg1**2:
            return 0.5
        return (be + ga + 2.0) / (2.0 * (al + 1.0))
    if al < -bg1:
        return (be + 1.0) * K / (be + ga + 2.0)
    if al**2 <= bg1**2:
        return (be + 1.0) / (be + ga + 2.0)
    return (be + 1.0) / (al + 1.0)


def _triangle01_lower(be: float, ga: float) -> float:
    return -0.5 if be**2 >= ga**2 else -(be + 1.0) / (be + ga + 2.0)


def _triangle00_threshold(be: float, ga: float) -> float:
    return 0.5 if be**2 <= ga**2 else (be + 1.0) / (be + ga + 2.0)


def tau_bounds(spec: FamilySpec, kind: str | None = None) -> TauBounds:
    """Closed-form admissible tau set for the family's probabilistic kind."""
    native = FAMILY_KIND[spec.kind]
    if kind is not None and kind != native:
        if spec.kind == TRIANGLE01:
            raise UsageError(
                "triangle01 only generates a discrete-time chain (tau2 must equal 1)")
        if spec.kind == TRIANGLE00:
            raise UsageError(
                "triangle00 does not generate a discrete-time chain; "
                "only the continuous generator tau1 J1 + tau2 J2 is admissible")
        raise UsageError(f"{spec.kind} only supports kind {native!r}")
    if spec.kind == PRODUCT_JACOBI:
        return TauBounds(form="interval", lower=0.0, upper=1.0, tau2_rule="one-minus",
                         description="P = tau J1 + (1 - tau) J2 with 0 <= tau <= 1")
    if spec.kind == PARABOLIC:
        return TauBounds(form="interval", lower=0.0, upper=1.0, tau2_rule="one-minus",
                         description="P = tau J1 + (1 - tau) J2 with 0 <= tau <= 1")
    if spec.kind == PRODUCT_LAGUERRE:
        return TauBounds(form="cone",
                         description="generator tau1 J1 + tau2 J2 with tau1, tau2 >= 0")
    if spec.kind == TRIANGLE01:
        al, be, ga = spec.params
        lo, up = _triangle01_lower(be, ga), _triangle01_upper(al, be, ga)
        return TauBounds(form="interval", lower=lo, upper=up, tau2_rule="one",
                         description=f"P = tau J1 + J2 with {lo:.12g} <= tau <= {up:.12g}")
    al, be, ga = spec.params
    thr = _triangle00_threshold(be, ga)
    return TauBounds(form="ratio", threshold=thr,
                     description=f"generator tau1 J1 + tau2 J2 with tau2 >= 0 and "
                                 f"tau1 >= {thr:.12g} * tau2")


def empirical_tau_bounds(spec: FamilySpec, n_matrix: int = 40) -> TauBounds:
    """Tau bounds recovered by scanning the per-entry linear constraints.

    Every off-band-diagonal entry of the combined matrix is tau-free; the
    banded entries are linear in tau, so each gives one half-line constraint.
    Entries up to level `n_matrix` are read off the assembled blocks; the tail
    in n and k is scanned through the same band values evaluated at large
    indices, where the constraints are monotone.
    """
    if spec.kind not in (TRIANGLE01, TRIANGLE00):
        raise UsageError(f"empirical tau scan only applies to triangle families, not {spec.kind}")
    al, be, ga = spec.params
    s = al + be + ga
    ks = np.concatenate([np.arange(0.0, 2001.0), [1e5, 1e6, 1e7, 1e9]])
    d = correction_factor(be, ga, ks)
    if spec.kind == TRIANGLE00:
        return TauBounds(form="ratio", threshold=float(d.max()),
                         description="empirical scan of tau1 a + tau2 a2 >= 0 constraints")
    # triangle01: constraints tau >= -D_k (A and C diagonals) and
    # tau <= D_k (1/(a+c) - 1) (B diagonal); scan a dense small-index grid
    # from the actual matrices plus a large-index tail grid
    lower = -float(d.min())
    upper = np.inf
    for n in range(n_matrix + 1):
        b1 = block_coefficients(spec, n, 1)
        b2 = block_coefficients(spec, n, 2)
        for M1, M2 in ((b1.A, b2.A), (b1.B, b2.B), (b1.C, b2.C)):
            coef, base = M1.ravel(), M2.ravel()
            neg = coef < -1e-15
            pos = coef > 1e-15
            if np.any(neg):
                upper = min(upper, float((-base[neg] / coef[neg]).min()))
            if np.any(pos):
                lower = max(lower, -float((base[pos] / coef[pos]).min()))
    ms = np.arange(0.0, 12.0)
    facs = np.array([1e3, 1e6, 1e9])
    n_grid = np.concatenate(
        [ks[:, None] + ms[None, :], np.maximum(ks, 1.0)[:, None] * facs[None, :]], axis=1)
    k_grid = np.broadcast_to(ks[:, None], n_grid.shape)
    q = 0.5 * (1.0 + (al**2 - (2 * k_grid + be + ga + 1.0) ** 2)
               / ((2 * n_grid + s + 1.0) * (2 * n_grid + s + 3.0)))
    f = d[:, None] * (1.0 / q - 1.0)
    upper = min(upper, float(f.min()))
    return TauBounds(form="interval", lower=lower, upper=upper, tau2_rule="one",
                     description="empirical scan of entrywise nonnegativity constraints")


@dataclass(frozen=True)
class QbdModel:
    """A family, combination weights (tau1, tau2), and a probabilistic kind."""

    spec: FamilySpec
    tau: tuple[float, float]
    kind: str

    def dense(self, N: int) -> DenseTruncation:
        return combine_dense(self.spec, self.tau, N)

    def as_dict(self) -> dict:
        return {"family": self.spec.as_dict(), "tau": list(self.tau), "kind": self.kind}


def canonical_tau(spec: FamilySpec, tau) -> tuple[float, float]:
    """Accept a scalar tau for discrete families or an explicit pair."""
    if np.isscalar(tau):
        rule = _TAU2_RULE.get(spec.kind)
        if rule is None:
            raise UsageError(f"{spec.kind} requires an explicit (tau1, tau2) pair")
        t1 = float(tau)
        return (t1, 1.0 - t1 if rule == "one-minus" else 1.0)
    t1, t2 = tau
    return (float(t1), float(t2))


def _violation_witness(spec: FamilySpec, tau: tuple[float, float], n_scan: int = 40):
    """Most negative entry of the truncated combination, as (value, (n, k))."""
    worst, where = 0.0, None
    for n in range(n_scan + 1):
        b1 = block_coefficients(spec, n, 1)
        b2 = block_coefficients(spec, n, 2)
        for M1, M2 in ((b1.A, b2.A), (b1.B, b2.B), (b1.C, b2.C)):
            if M1.size == 0:
                continue
            entries = tau[0] * M1 + tau[1] * M2
            k = int(np.argmin(entries.min(axis=1)))
            value = float(entries[k].min())
            # continuous kinds only constrain off-diagonal entries
            if spec.kind in (PRODUCT_LAGUERRE, TRIANGLE00) and M1 is b1.B:
                row = entries[k].copy()
                row[k] = 0.0
                value = float(row.min())
            if value < worst:
                worst, where = value, (n, k)
    return worst, where


def combine(spec: FamilySpec, tau, kind: str | None = None) -> QbdModel:
    """Form the QBD model tau1 J1 + tau2 J2 after validating admissibility."""
    native = FAMILY_KIND[spec.kind]
    bounds = tau_bounds(spec, kind)
    pair = canonical_tau(spec, tau)
    if not bounds.contains(pair):
        worst, where = _violation_witness(spec, pair)
        witness = f"; first negative entry {worst:.6g} at state (n,k)={where}" if where else \
            "; no finite-truncation witness (constraint binds in the tail)"
        raise DomainError(
            f"tau={pair} violates the admissible set: {bounds.description}{witness}")
    return QbdModel(spec=spec, tau=pair, kind=native)


# ---------------------------------------------------------------------------
# invariant measures
# ---------------------------------------------------------------------------


def invariant_pi(spec: FamilySpec, N: int, method: str = "closed-form",
                 perturb_seed: int | None = None) -> list[np.ndarray]:
    """Diagonals of Pi_0 .. Pi_N.

    method "closed-form" uses the per-family norm formulas; "recursion" runs
    Pi_n = sum_i G_{n,i} Pi_{n-1} A_{n-1,i} with the least-squares generalized
    inverse of the stacked C_n^T.  With perturb_seed set, the generalized
    inverse is shifted by a random component of its left null space, which
    must leave the result unchanged.
    """
    if N < 0:
        raise DomainError(f"N={N} must be >= 0")
    if method == "closed-form":
        return [norm_diagonal(spec, n).diag for n in range(N + 1)]
    if method != "recursion":
        raise UsageError(f"unknown method {method!r}")
    rng = np.random.default_rng(perturb_seed) if perturb_seed is not None else None
    pis = [np.ones(1)]
    for n in range(1, N + 1):
        bm1_1 = block_coefficients(spec, n - 1, 1)
        bm1_2 = block_coefficients(spec, n - 1, 2)
        bn_1 = block_coefficients(spec, n, 1)
        bn_2 = block_coefficients(spec, n, 2)
        S = np.vstack([bn_1.C.T, bn_2.C.T])  # (2n) x (n+1)
        G = np.linalg.pinv(S)
        sv = np.linalg.svd(S, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            raise NumericError(f"stacked C_{n}^T is rank deficient (sv ratio {sv[-1]/sv[0]:.3g})")
        if rng is not None:
            Y = rng.standard_normal(G.shape)
            G = G + Y @ (np.eye(S.shape[0]) - S @ G)
        stacked = np.vstack([pis[-1][:, None] * bm1_1.A, pis[-1][:, None] * bm1_2.A])
        Pi = G @ stacked
        pis.append(np.diag(Pi).copy())
    return pis


@dataclass(frozen=True)
class InvariantMeasure:
    """Row blocks (Pi_n e)^T of the invariant row vector pi."""

    blocks: tuple[np.ndarray, ...]

    def flat(self) -> np.ndarray:
        return np.concatenate(self.blocks)


def invariant_measure(model: QbdModel, N: int) -> InvariantMeasure:
    pis = invariant_pi(model.spec, N, method="closed-form")
    return InvariantMeasure(blocks=tuple(pis))


def deficit_vector(model: QbdModel, N: int) -> np.ndarray:
    """Killing rate per state (negated generator row sum), levels 0..N."""
    if model.kind != CONTINUOUS:
        raise UsageError("deficit vector is defined for continuous models only")
    out = np.zeros(truncation_size(N))
    for n in range(N + 1):
        b1 = block_coefficients(model.spec, n, 1)
        b2 = block_coefficients(model.spec, n, 2)
        rows = model.tau[0] * (b1.A.sum(1) + b1.B.sum(1) + b1.C.sum(1)) \
            + model.tau[1] * (b2.A.sum(1) + b2.B.sum(1) + b2.C.sum(1))
        r0 = flat_index(n, 0)
        out[r0:r0 + n + 1] = -rows
    out[np.abs(out) < 1e-13] = 0.0
    return out


def stationarity_residual(model: QbdModel, N: int) -> float:
    """Max interior-column residual of pi P = pi (discrete) or pi A = 0.

    Columns at level N are excluded (the hard cut removes their inflow from
    level N+1); for continuous models, columns of killed states are excluded
    as well, since there pi A balances the killing flux instead of zero.
    """
    if N < 2:
        raise UsageError(f"stationarity residual needs N >= 2, got {N}")
    pi = invariant_measure(model, N).flat()
    M = model.dense(N).entries
    if model.kind == DISCRETE:
        res = pi @ M - pi
    else:
        res = pi @ M
    keep = np.ones(pi.size, dtype=bool)
    keep[flat_index(N, 0):] = False
    if model.kind == CONTINUOUS:
        keep &= deficit_vector(model, N) == 0.0
    scale = max(1.0, np.abs(pi[keep]).max())
    return float(np.abs(res[keep]).max() / scale)


# ---------------------------------------------------------------------------
# recurrence classification
# ---------------------------------------------------------------------------

TRANSIENT = "transient"
NULL_RECURRENT = "null-recurrent"


@dataclass(frozen=True)
class RecurrenceVerdict:
    verdict: str
    inequality: str
    holds: bool

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "inequality": self.inequality,
                "inequality_holds": self.holds}


def classify_recurrence(model: QbdModel) -> RecurrenceVerdict:
    """Closed-form recurrence classification.

    The built-in families have absolutely continuous spectral measures, so a
    recurrent chain is always null recurrent, never positive recurrent.
    """
    spec, (t1, t2) = model.spec, model.tau
    if spec.kind == PRODUCT_JACOBI:
        al, be, ga, de = spec.params
        if t1 == 1.0:
            cond, text = be <= 0.0, f"beta <= 0 (tau = 1 edge case; beta = {be:g})"
        elif t1 == 0.0:
            cond, text = de <= 0.0, f"delta <= 0 (tau = 0 edge case; delta = {de:g})"
        else:
            cond, text = be + de <= -1.0, f"beta + delta <= -1 (beta + delta = {be + de:g})"
    elif spec.kind == PRODUCT_LAGUERRE:
        al, be = spec.params
        if t1 == 0.0:
            cond, text = be <= 0.0, f"beta <= 0 (tau1 = 0 edge case; beta = {be:g})"
        elif t2 == 0.0:
            cond, text = al <= 0.0, f"alpha <= 0 (tau2 = 0 edge case; alpha = {al:g})"
        else:
            cond, text = al + be <= -1.0, f"alpha + beta <= -1 (alpha + beta = {al + be:g})"
    elif spec.kind == PARABOLIC:
        al, be = spec.params
        if t1 == 1.0:
            cond, text = al <= 0.0, f"alpha <= 0 (tau = 1 edge case; alpha = {al:g})"
        else:
            cond, text = al + be <= -1.0, f"alpha + beta <= -1 (alpha + beta = {al + be:g})"
    elif spec.kind == TRIANGLE01:
        al, be, ga = spec.params
        cond, text = al + ga <= -1.0, f"alpha + gamma <= -1 (alpha + gamma = {al + ga:g})"
    else:  # triangle00
        al, be, ga = spec.params
        if t2 == 0.0:
            cond, text = al <= 0.0, f"alpha <= 0 (tau2 = 0 edge case; alpha = {al:g})"
        else:
            cond, text = al + be <= -1.0, f"alpha + beta <= -1 (alpha + beta = {al + be:g})"
    return RecurrenceVerdict(verdict=NULL_RECURRENT if cond else TRANSIENT,
                             inequality=text, holds=cond)
