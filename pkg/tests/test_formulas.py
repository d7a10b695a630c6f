import math
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trilab.analytics import formulas as f
from trilab.analytics.formulas import PAPER_PARAMS, ParamSet


def test_time_scaling():
    assert f.p_of(0, 10) == 1
    assert f.p_of(5, 10) == pytest.approx(0.7)
    assert f.t_of(5, 10) == pytest.approx(0.05)
    n, i = 10, 5
    p = f.p_of(i, n)
    assert comb(n, 2) - 3 * i == 30 == pytest.approx((n * n * p - n) / 2)


def test_phi_gamma_lambda():
    assert f.phi(1, 50) == pytest.approx(math.log(50) ** 2)
    # 6 / ln 403 evaluated at 30 digits with mpmath: 1.00017727109502420
    assert f.gamma_hat(403, 0.5) == pytest.approx(0.5 - 1.0001772710950242, abs=1e-13)
    for n in (3, 100, 10**6):
        assert f.lambda_of(n) * f.phi(1, n) == pytest.approx(1)
    assert f.gamma_hat(20) < 0


def test_p_star_vacuous_at_desk_scale():
    # mpmath value 36.5183212044666...
    assert f.p_star(2000) == pytest.approx(36.518321204466628, rel=1e-12)
    th = f.thresholds(2000)
    assert th.vacuous and th.p_star > 1


def test_p_one_small_n():
    # mpmath value 1.6938743720073477
    assert f.p_one(8) == pytest.approx(1.6938743720073477, rel=1e-12)
    assert f.p_one(8) > 1


def test_p_star_ratio_bounded():
    ratios = [f.p_star(10.0**k) * (10.0**k) ** (1 / 3) / math.log(10.0**k) ** (10 / 3)
              for k in range(3, 10)]
    # the ratio rises towards its supremum 6^(1/3) e^2 without reaching it
    limit = 6 ** (1 / 3) * math.e**2
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert max(ratios) < limit
    assert ratios[0] == pytest.approx(0.48792177210730764, rel=1e-10)
    assert ratios[-1] == pytest.approx(1.719915105225042, rel=1e-10)
    far = f.p_star(1e300) * 1e100 / math.log(1e300) ** (10 / 3)
    assert ratios[-1] < far < limit


def test_p_floor_policies():
    n = 2000
    assert f.p_floor(n) == pytest.approx(n ** (-1 / 3))
    assert f.p_floor(n, policy="auto") == f.p_star(n)
    assert f.p_floor(n, policy="paper") == f.p_star(n)
    assert f.p_floor(n, policy=0.3) == 0.3
    with pytest.raises(ValueError):
        f.p_floor(n, policy="bogus")


def test_envelope_at_p1():
    n = 400
    c, w = f.envelope("Yuv", 1, n)
    assert c == n and w == pytest.approx(math.sqrt(n) * math.log(n) ** 2)
    c, w = f.envelope("Q", 1, 100)
    assert c == pytest.approx(166666.66666666666)
    assert abs(comb(100, 3) - c) < w
    # mpmath: 2 sqrt(100 ln^5 100) = 910.2154575947461
    assert f.half_width("Yuvw", 1, 100) == pytest.approx(910.2154575947461, rel=1e-12)
    assert f.yuvw_strict_half_width(1, 100) * 2 == pytest.approx(910.2154575947461, rel=1e-12)


def test_envelope_observed_centers():
    c, _ = f.envelope("Ruv", 0.5, 100, observed=(40, 12))
    assert c == pytest.approx(240)
    c, _ = f.envelope("Tu", 0.5, 100, observed=np.array([10, 20]))
    assert c.tolist() == pytest.approx([25, 100])
    with pytest.raises(ValueError):
        f.center("Ruv", 0.5, 100)
    with pytest.raises(ValueError):
        f.center("Tu", 0.5, 100)
    with pytest.raises(ValueError):
        f.envelope("nope", 0.5, 100)


@given(kind=st.sampled_from(f.KINDS), p=st.floats(1e-6, 1), n=st.integers(3, 10**7))
def test_half_width_positive(kind, p, n):
    assert f.half_width(kind, p, n) > 0


def test_q_upper_alt():
    assert f.q_upper_alt(1, 30) == pytest.approx(30**3 / 6 + 300)
    assert comb(30, 3) <= f.q_upper_alt(1, 30)


def test_constants_paper_values():
    report = f.check_constants(PAPER_PARAMS)
    assert [c.slack for c in report] == [0, 0, 0, Fraction(1, 8)]
    assert all(c.holds for c in report)


def test_constants_kappa_perturbed():
    report = f.check_constants(ParamSet(kappa=0.3))
    assert not report[0].holds
    assert report[0].lhs == Fraction(1, 4) and report[0].rhs == Fraction(3, 10)


def test_constants_gamma_to_one():
    assert not f.check_constants(ParamSet(gamma=1))[0].holds


@pytest.mark.parametrize("field", ["alpha", "beta", "kappa", "mu", "gamma"])
def test_paramset_rejects_nonpositive(field):
    with pytest.raises(ValueError):
        ParamSet(**{field: 0})


def test_freedman_values():
    assert f.freedman_tail(1, 1, 1) == pytest.approx(math.exp(-0.25))
    assert f.freedman_tail(2, 1, 0.5) == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        f.freedman_tail(0, 1, 1)


def test_bilinear_examples():
    assert f.bilinear_sum_bound_check([3, 3, 3], [1, 5, 2])
    assert f.bilinear_sum_bound_check([0, 1], [0, 1])
    with pytest.raises(ValueError):
        f.bilinear_sum_bound_check([1], [1, 2])
