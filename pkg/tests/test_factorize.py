import numpy as np
import pytest

from qbdpoly.errors import DomainError, UsageError
from qbdpoly.blockmat import flat_index, truncation_size
from qbdpoly.factorize import (
    LUFactors,
    triangle_lu,
    verify_factorization,
    urn_table,
    urn_consistency_check,
)


def test_level_zero_factor_values():
    # alpha = beta = gamma = 0: S_0 = [1], X_0 = [1/6, 1/2], Y_0 = [1/3]
    fac = triangle_lu(0.0, 0.0, 0.0, 2)
    assert fac.S[0][0, 0] == pytest.approx(1.0)
    assert fac.X[0][0, 0] == pytest.approx(1.0 / 6.0)
    assert fac.X[0][0, 1] == pytest.approx(1.0 / 2.0)
    assert fac.Y[0][0, 0] == pytest.approx(1.0 / 3.0)
    # s1 at level n = 1, phase k = 1 equals 1/12 at zero parameters
    assert fac.S[1][1, 0] == pytest.approx(1.0 / 12.0)


def test_lu_residual_and_stochastic_factors():
    for al, be, ga in [(0.5, 0.2, 0.3), (1.3, 0.4, 2.2)]:
        rep = verify_factorization(al, be, ga, 12, mode="LU")
        assert rep["pass"] and rep["max_residual"] < 1e-13
        fac = triangle_lu(al, be, ga, 12)
        # each factor block row is a probability vector
        for n in range(12):
            low = fac.S[n].sum(axis=1) + fac.R[n].sum(axis=1)
            up = fac.Y[n].sum(axis=1) + fac.X[n].sum(axis=1)
            assert np.abs(low - 1.0).max() < 1e-13
            assert np.abs(up - 1.0).max() < 1e-13
            assert min(fac.S[n].min(), fac.R[n].min() if n else 0.0,
                       fac.X[n].min(), fac.Y[n].min()) >= 0.0


def test_ul_shift_hypothesis():
    rep = verify_factorization(2.0, 1.0, 3.0, 10, mode="UL-shift")
    assert rep["pass"] and rep["max_residual"] < 1e-13
    with pytest.raises(DomainError):
        verify_factorization(0.5, 0.0, 0.5, 10, mode="UL-shift")
    with pytest.raises(UsageError):
        verify_factorization(0.5, 0.5, 0.5, 10, mode="QR")
    with pytest.raises(UsageError):
        verify_factorization(0.5, 0.5, 0.5, 1)


def test_parabolic_urn_value():
    # at alpha = beta = 0 the double-down move from (1, 1) has probability 1/5
    table = urn_table("ParabolicUrn", {"alpha": 0.0, "beta": 0.0}, 1, 1)
    assert table[(-1, -1)] == pytest.approx(0.2)
    assert sum(table.values()) == pytest.approx(1.0)


def test_urn_tables_are_probabilities():
    tables = [
        ("ProductJacobiUrn", {"alpha": 1.0, "beta": 2.0, "gamma": 0.0, "delta": 1.0,
                              "tau": 0.4}),
        ("ParabolicUrn", {"alpha": 1.0, "beta": 2.0}),
        ("TriangleComposed", {"alpha": 1.0, "beta": 2.0, "gamma": 0.5}),
    ]
    for kind, params in tables:
        for n, k in [(0, 0), (2, 1), (4, 4)]:
            table = urn_table(kind, params, n, k)
            vals = np.array(list(table.values()))
            assert vals.min() >= 0.0
            assert vals.sum() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(UsageError):
        urn_table("CoinUrn", {}, 0, 0)
    with pytest.raises(UsageError):
        urn_table("ParabolicUrn", {"alpha": 0.0, "beta": 0.0}, 1, 2)


def test_urn_consistency():
    checks = [
        ("ProductJacobiUrn", {"alpha": 0.5, "beta": 0.7, "gamma": 0.2, "delta": 1.1,
                              "tau": 0.4}),
        ("ParabolicUrn", {"alpha": 0.4, "beta": 0.6}),
        ("TriangleComposed", {"alpha": 0.5, "beta": 0.2, "gamma": 0.3}),
    ]
    for kind, params in checks:
        rep = urn_consistency_check(kind, params, 8)
        assert rep["pass"] and rep["max_abs_error"] < 1e-13
