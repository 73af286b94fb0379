import io
from fractions import Fraction

import pytest

from corgw.arith import divisors, jordan2, sigma, sigma_bar
from corgw.diagrams import TangencyProfile, invariant
from corgw.qseries import (
    GASeries,
    factorization_check,
    invariant_series,
    local_series,
    q_derivative,
    sigma_series,
    templates_for,
    write_series_csv,
)
from corgw.refined import bold_sigma
from corgw.torsion import GroupAlgebraElement, theta


def test_sigma_series_examples():
    s1 = sigma_series(1, 6)
    assert s1[1:] == [1, 3, 4, 7, 6, 12]
    s2 = sigma_series(2, 6)
    assert s2[1:] == [0, 1, 0, 3, 0, 4]
    for d in (2, 3, 5):
        s = sigma_series(d, 30)
        for a in range(1, 31):
            assert s[a] == (s1[a // d] if a % d == 0 and a // d <= 6 else s[a])
            if a % d == 0:
                assert s[a] == sigma(a // d)


def test_q_derivative():
    s = sigma_series(1, 8)
    d = q_derivative(s)
    assert d[1] == s[1]
    assert all(d[a] == a * s[a] for a in range(1, 9))
    z = [0] * 9
    assert q_derivative(z) == z
    # n-1 applications give a^(n-1) sigma_bar
    dd = q_derivative(q_derivative(s))
    assert all(dd[a] == a * a * sigma(a) for a in range(1, 9))


def test_local_series_zero_coefficient_identity():
    # the (0,0)-coefficient series is (w1/delta)^2 times the J2-weighted
    # combination of shifted sigma series, after n-1 derivatives
    n_trunc = 24
    for (n, w1, delta) in ((2, 2, 2), (3, 6, 3), (2, 12, 4), (4, 6, 6)):
        ls = local_series(n, w1, delta, n_trunc)
        combo = [0] * (n_trunc + 1)
        for d in divisors(delta):
            s = sigma_series(d, n_trunc)
            for a in range(1, n_trunc + 1):
                combo[a] += jordan2(d) * s[a]
        for _ in range(n - 1):
            combo = q_derivative(combo)
        for a in range(1, n_trunc + 1):
            got = ls.coefficient(a).coefficient(0, 0)
            assert got == Fraction(w1 * w1, delta * delta) * combo[a]


def test_local_series_unrefined_and_mass():
    n_trunc = 15
    ls = local_series(3, 4, 1, n_trunc)
    for a in range(1, n_trunc + 1):
        assert ls.coefficient(a) == a * a * sigma(a) * 16 * GroupAlgebraElement.unit(1)
    ls2 = local_series(2, 6, 3, n_trunc)
    for a in range(1, n_trunc + 1):
        assert ls2.coefficient(a).total_mass == a * sigma(a) * 36


def test_invariant_series_matches_pointwise():
    p = TangencyProfile((2, -2))
    s = invariant_series(2, p, 2, 8)
    for a in range(1, 9):
        assert s.coefficient(a) == invariant(2, a, p, 2)
        assert s.coefficient(a).total_mass == invariant(2, a, p, 1).total_mass


def test_gaseries_algebra():
    one = GroupAlgebraElement.unit(1)
    s = GASeries(1, (1 * one, 2 * one, 3 * one))
    t = GASeries(1, (1 * one, 0 * one, 0 * one))
    st = s.cauchy(t)
    # coefficient of q^2 is 1*1, of q^3 is 2*1
    assert st.coefficient(1) == GroupAlgebraElement.zero(1)
    assert st.coefficient(2) == one
    assert st.coefficient(3) == 2 * one


def test_delta2_building_block():
    # sum_a bold_sigma(2, a) q^a splits into the two shifted sigma blocks
    n_trunc = 40
    for a in range(1, n_trunc + 1):
        lhs = bold_sigma(2, a)
        rhs = sigma_bar(2, a) * theta(2, 1) + (sigma(a) - sigma_bar(2, a)) * theta(2, 2)
        assert lhs == rhs


def test_factorization_small_cases():
    rep = factorization_check(1, TangencyProfile((2, -2)), 1, 20)
    assert rep.ok and len(rep.templates) == 2
    rep = factorization_check(3, TangencyProfile((2, -2)), 2, 12)
    assert rep.ok and len(rep.templates) == 6
    for t in rep.templates:
        assert t.delta_gcd in (1, 2)


def test_templates_for_counts():
    p = TangencyProfile((2, -2))
    assert len(templates_for(1, p)) == 2
    assert len(templates_for(2, p)) == 3
    assert len(templates_for(3, p)) == 6


def test_csv_output():
    s = local_series(2, 2, 2, 3)
    buf = io.StringIO()
    write_series_csv(s, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == 'a,"(0,0)","(0,1)","(1,0)","(1,1)"'
    assert lines[1].startswith("1,")
    # a=1: w1^2 theta(2,2): every point 4*(1/4) = 1
    assert lines[1] == "1,1/1,1/1,1/1,1/1"
    assert lines[2].split(",")[0] == "2"
    # truncation 0: header only
    buf = io.StringIO()
    write_series_csv(GASeries(2, ()), buf)
    assert buf.getvalue().strip() == "a"


def test_factorization_precondition():
    with pytest.raises(ValueError):
        factorization_check(1, TangencyProfile((3, -3)), 2, 5)
