import numpy as np
import pytest
from scipy.special import eval_jacobi, eval_genlaguerre, binom
from scipy.stats import beta as beta_dist, gamma as gamma_dist

from qbdpoly.errors import DomainError
from qbdpoly import orthopoly as op


def test_jacobi_chain_rows_sum_to_one():
    for al, be in [(0.0, 0.0), (1.5, -0.5), (4.0, 2.0)]:
        for n in range(6):
            c = op.jacobi_chain(al, be, n)
            assert c.a + c.b + c.c == pytest.approx(1.0, abs=1e-15)
            assert c.a > 0
            assert (c.c == 0.0) == (n == 0)


def test_laguerre_chain_rows_sum_to_zero():
    for variant in op.LAGUERRE_VARIANTS:
        for n in range(6):
            c = op.laguerre_chain(1.3, n, variant)
            assert c.a + c.b + c.c == pytest.approx(0.0, abs=1e-12)


def test_eval_jacobi_standard_matches_scipy():
    t = np.linspace(-1.0, 1.0, 7)
    for al, be in [(0.0, 0.0), (0.5, 1.5), (2.0, -0.3)]:
        for n in range(7):
            ours = op.eval_jacobi(al, be, n, t)
            ref = eval_jacobi(n, al, be, t)
            assert np.abs(ours - ref).max() < 1e-12 * max(1.0, np.abs(ref).max())


def test_eval_jacobi_unit_at_one():
    for al, be in [(0.0, 0.0), (0.5, 1.5)]:
        for n in range(7):
            assert op.eval_jacobi(al, be, n, 1.0, "unit-at-1") == pytest.approx(1.0, abs=1e-12)


def test_eval_laguerre_matches_scipy():
    t = np.linspace(0.0, 5.0, 6)
    al = 0.7
    for n in range(7):
        ref = eval_genlaguerre(n, al, t)
        ours = op.eval_laguerre(al, n, t, "endpoint-binomial")
        assert np.abs(ours - ref).max() < 1e-10 * max(1.0, np.abs(ref).max())
        one = op.eval_laguerre(al, n, t, "endpoint-one")
        assert np.abs(one * binom(n + al, n) - ref).max() < 1e-10 * max(1.0, np.abs(ref).max())
        assert op.eval_laguerre(al, n, 0.0, "endpoint-one") == pytest.approx(1.0, abs=1e-12)


def test_gauss_jacobi_rule_moments():
    al, be, m = 1.2, 0.4, 8
    rule = op.gauss_jacobi_rule(al, be, m)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-13)
    for p in range(2 * m):
        # weight x^al (1-x)^be on [0,1] is Beta(al+1, be+1)
        ref = beta_dist(al + 1.0, be + 1.0).moment(p)
        assert rule.integrate(lambda x, p=p: x ** p) == pytest.approx(ref, rel=1e-12)


def test_gauss_laguerre_rule_moments():
    al, m = 0.6, 8
    rule = op.gauss_laguerre_rule(al, m)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-13)
    for p in range(2 * m):
        ref = gamma_dist(al + 1.0).moment(p)
        assert rule.integrate(lambda x, p=p: x ** p) == pytest.approx(ref, rel=1e-11)


def test_domain_errors():
    with pytest.raises(DomainError):
        op.jacobi_chain(-1.0, 0.0, 0)
    with pytest.raises(DomainError):
        op.laguerre_chain(0.0, 1, "nope")
    with pytest.raises(DomainError):
        op.eval_jacobi(0.0, 0.0, 2, 0.5, convention="weird")
    with pytest.raises(DomainError):
        op.gauss_jacobi_rule(0.0, 0.0, 0)
    with pytest.raises(DomainError):
        op.gauss_1d_rule("hermite", 4, alpha=0.0)
