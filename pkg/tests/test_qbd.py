import numpy as np
import pytest

from qbdpoly.errors import DomainError, UsageError
from qbdpoly.families import family_spec
from qbdpoly.qbd import (
    DISCRETE,
    CONTINUOUS,
    combine,
    canonical_tau,
    tau_bounds,
    empirical_tau_bounds,
    invariant_pi,
    invariant_measure,
    deficit_vector,
    stationarity_residual,
    classify_recurrence,
)

PJ = family_spec("product-jacobi", alpha=0.5, beta=0.7, gamma=0.2, delta=1.1)
PL = family_spec("product-laguerre", alpha=1.0, beta=0.5)
PAR = family_spec("parabolic", alpha=0.4, beta=0.6)
T01 = family_spec("triangle01", alpha=0.5, beta=0.2, gamma=0.3)
T00 = family_spec("triangle00", alpha=0.5, beta=0.2, gamma=0.3)

ADMISSIBLE = [(PJ, 0.4), (PL, (0.7, 0.3)), (PAR, 0.6), (T01, 0.25), (T00, (1.2, 1.0))]


def test_canonical_tau():
    assert canonical_tau(PJ, 0.4) == (0.4, 0.6)
    assert canonical_tau(T01, 0.25) == (0.25, 1.0)
    assert canonical_tau(PL, (0.7, 0.3)) == (0.7, 0.3)
    with pytest.raises(UsageError):
        canonical_tau(PL, 0.5)


def test_tau_bounds_forms():
    assert tau_bounds(PJ).form == "interval"
    assert tau_bounds(PL).form == "cone"
    assert tau_bounds(T00).form == "ratio"
    b = tau_bounds(T01)
    assert b.lower < 0 < b.upper
    assert b.contains((0.0, 1.0))
    assert not b.contains((b.upper + 0.1, 1.0))
    assert not b.contains((0.0, 0.5))  # tau2 must be 1
    with pytest.raises(UsageError):
        tau_bounds(T01, kind=CONTINUOUS)
    with pytest.raises(UsageError):
        tau_bounds(T00, kind=DISCRETE)


def test_combine_validates_and_witnesses():
    for spec, tau in ADMISSIBLE:
        model = combine(spec, tau)
        assert model.kind in (DISCRETE, CONTINUOUS)
    with pytest.raises(DomainError, match="negative entry"):
        combine(T01, 0.9)
    with pytest.raises(DomainError):
        combine(PJ, 1.4)
    with pytest.raises(DomainError):
        combine(PL, (-0.1, 0.5))


def test_empirical_tau_bounds_match_closed_form():
    # parameter points where the closed-form bounds are attained by the scan
    for params in [(0.5, 0.2, 0.3), (2.0, 1.0, 0.4), (0.3, -0.4, -0.4)]:
        spec = family_spec("triangle01", alpha=params[0], beta=params[1], gamma=params[2])
        cf, em = tau_bounds(spec), empirical_tau_bounds(spec)
        assert em.lower == pytest.approx(cf.lower, abs=1e-9)
        assert em.upper == pytest.approx(cf.upper, abs=1e-9)
    spec = family_spec("triangle00", alpha=0.2, beta=0.1, gamma=1.5)
    assert empirical_tau_bounds(spec).threshold == pytest.approx(
        tau_bounds(spec).threshold, abs=1e-12)
    with pytest.raises(UsageError):
        empirical_tau_bounds(PJ)


@pytest.mark.parametrize("spec", [PJ, PL, PAR, T01, T00],
                         ids=lambda s: s.kind)
def test_invariant_pi_recursion_matches_closed_form(spec):
    closed = invariant_pi(spec, 8, "closed-form")
    rec = invariant_pi(spec, 8, "recursion")
    pert = invariant_pi(spec, 8, "recursion", perturb_seed=11)
    for a, b, c in zip(closed, rec, pert):
        scale = max(1.0, np.abs(a).max())
        assert np.abs(a - b).max() < 1e-11 * scale
        assert np.abs(a - c).max() < 1e-10 * scale


@pytest.mark.parametrize("spec,tau", ADMISSIBLE, ids=lambda v: str(v)[:20])
def test_stationarity(spec, tau):
    model = combine(spec, tau)
    assert stationarity_residual(model, 8) < 1e-12


def test_deficit_vector_closed_form():
    model = combine(PL, (0.7, 0.3))
    d = deficit_vector(model, 5)
    t1, t2 = model.tau
    al, be = PL.params
    from qbdpoly.blockmat import flat_index
    for n in range(5):
        for k in range(n + 1):
            expect = (t1 * al if k == n else 0.0) + (t2 * be if k == 0 else 0.0)
            assert d[flat_index(n, k)] == pytest.approx(expect, abs=1e-13)
    with pytest.raises(UsageError):
        deficit_vector(combine(PJ, 0.4), 4)


def test_classify_recurrence_cases():
    # transient and null-recurrent sides of a few closed-form inequalities
    m = combine(family_spec("product-jacobi", alpha=0.5, beta=-0.6, gamma=0.2, delta=-0.6), 0.5)
    assert classify_recurrence(m).verdict == "null-recurrent"
    m = combine(family_spec("product-jacobi", alpha=0.5, beta=0.7, gamma=0.2, delta=1.1), 0.5)
    assert classify_recurrence(m).verdict == "transient"
    m = combine(family_spec("product-laguerre", alpha=0.5, beta=-0.2), (1.0, 0.0))
    v = classify_recurrence(m)
    assert v.verdict == "transient" and "tau2 = 0" in v.inequality
    m = combine(family_spec("triangle01", alpha=-0.6, beta=0.0, gamma=-0.6), 0.1)
    assert classify_recurrence(m).verdict == "null-recurrent"
