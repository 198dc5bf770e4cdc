"""Karlin-McGregor integral representation of transition probabilities.

n-step and time-t transition entries are weighted integrals of products of
the orthogonal basis against the orthogonality measure, evaluated by
exact-degree Gaussian quadrature, and cross-checked against truncated matrix
propagators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError, NumericError
from .families import PRODUCT_JACOBI, PARABOLIC, TRIANGLE01, domain_quadrature, eval_basis, norm_diagonal
from .qbd import QbdModel, DISCRETE, CONTINUOUS
from .blockmat import flat_index, propagator_power, propagator_exponential, truncation_size


@dataclass(frozen=True)
class TransitionQuery:
    """Transition from (level, phase) to (level, phase) over a horizon.

    Exactly one of steps (discrete) or time (continuous) must be set.
    """

    from_state: tuple[int, int]
    to_state: tuple[int, int]
    steps: int | None = None
    time: float | None = None

    def __post_init__(self):
        for n, k in (self.from_state, self.to_state):
            if not 0 <= k <= n:
                raise UsageError(f"phase {k} out of range at level {n}")
        if (self.steps is None) == (self.time is None):
            raise UsageError("exactly one of steps/time must be given")
        if self.steps is not None and self.steps < 0:
            raise UsageError(f"steps={self.steps} must be >= 0")
        if self.time is not None and self.time < 0:
            raise UsageError(f"time={self.time} must be >= 0")


def _spectral_factor(model: QbdModel, x, y):
    """The scalar function of (x, y) whose powers / exponential drive the KM formula."""
    t1, t2 = model.tau
    if model.spec.kind == TRIANGLE01:
        return y - t1 * x
    if model.spec.kind in (PRODUCT_JACOBI, PARABOLIC):
        return t1 * x + t2 * y
    # continuous kinds: generator spectral variable -(tau1 x + tau2 y)
    return t1 * x + t2 * y


def km_entry(model: QbdModel, q: TransitionQuery) -> float:
    """Transition probability by the Karlin-McGregor integral."""
    (i, ip), (j, jp) = q.from_state, q.to_state
    pij = norm_diagonal(model.spec, j).diag[jp]
    if q.steps is not None:
        if model.kind != DISCRETE:
            raise UsageError("steps horizon requires a discrete model")
        n = q.steps
        # the integrand is polynomial with per-variable degree <= i + j + n
        # after the domain substitutions; +3 is margin
        m = i + j + n + 3
        rule = domain_quadrature(model.spec, m)
        x, y = rule.nodes[:, 0], rule.nodes[:, 1]
        f = _spectral_factor(model, x, y) ** n
        qi = eval_basis(model.spec, i, x, y)[ip]
        qj = eval_basis(model.spec, j, x, y)[jp]
        return pij * float(np.dot(rule.weights, f * qi * qj))
    if model.kind != CONTINUOUS:
        raise UsageError("time horizon requires a continuous model")
    t = q.time
    prev = None
    for m in (24, 48, 96, 192, 384):
        rule = domain_quadrature(model.spec, m)
        x, y = rule.nodes[:, 0], rule.nodes[:, 1]
        f = np.exp(-_spectral_factor(model, x, y) * t)
        qi = eval_basis(model.spec, i, x, y)[ip]
        qj = eval_basis(model.spec, j, x, y)[jp]
        val = pij * float(np.dot(rule.weights, f * qi * qj))
        if prev is not None and abs(val - prev) < 1e-11 * max(1.0, abs(val)):
            return val
        prev = val
    raise NumericError("continuous KM quadrature did not stabilize to 1e-11")


def spectral_cross_check(model: QbdModel, N: int, steps: int | None = None,
                         time: float | None = None, max_level: int = 4) -> dict:
    """Max deviation between KM integrals and the truncated propagator.

    Discrete horizons require max_level + steps <= N so the compared rows of
    P^n are unaffected by the hard cut; continuous horizons report the
    probability mass leaked to level N as the truncation-error proxy.
    """
    M = model.dense(N)
    if steps is not None:
        if max_level + steps > N:
            raise UsageError("max_level + steps must be <= N for an exact comparison")
        prop = propagator_power(M, steps).entries
    else:
        prop = propagator_exponential(M, time).entries
    worst = 0.0
    count = 0
    for i in range(max_level + 1):
        jmax = min(i + steps, N) if steps is not None else max_level
        for ip in range(i + 1):
            for j in range(jmax + 1):
                for jp in range(j + 1):
                    q = TransitionQuery((i, ip), (j, jp), steps=steps, time=time)
                    km = km_entry(model, q)
                    ref = prop[flat_index(i, ip), flat_index(j, jp)]
                    worst = max(worst, abs(km - ref))
                    count += 1
    report = {"max_abs_error": worst, "queries": count, "N": N}
    if time is not None:
        top = prop[:truncation_size(max_level), flat_index(N, 0):]
        report["leakage"] = float(top.sum(axis=1).max())
    return report
