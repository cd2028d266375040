import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import lambertw

from icq.confidence import ConfidenceState
from icq.core import ICQWarning
from icq.errors import DomainError, ParameterError, SearchExhaustedError
from icq.theory import (
    c_constant,
    c_constant_tight,
    delta_max,
    lambert_w_minus1,
    per_arm_term,
    per_arm_term_unquantized,
    sample_bound,
    t_j_oracle,
)


def test_c_examples():
    # high-precision values of 1.5*4/(4-sqrt2) and 1.25*8/(8-sqrt2)
    assert c_constant(2, 2) == pytest.approx(2.32037724101704, rel=1e-12)
    assert c_constant(3, 2) == pytest.approx(1.51842154231824, rel=1e-12)
    assert c_constant(40, 2) == pytest.approx(1.0, abs=1e-9)


def test_c_domain_and_monotonicity():
    with pytest.raises(DomainError):
        c_constant(1, 4)
    with pytest.raises(ParameterError):
        c_constant(2, 1)
    for alpha in (2, 3):
        cs = [c_constant(B, alpha) for B in range(1, 12)]
        assert all(a > b for a, b in zip(cs, cs[1:]))
        assert all(c > 1 for c in cs)
    assert c_constant_tight(3, 2) < c_constant(3, 2)


def test_delta_max_examples():
    assert delta_max(5, 2, 0.0, 1.0, 0.5) == pytest.approx(10.8268226589290, rel=1e-12)
    assert delta_max(10, 2, 0.0, 1.0, 0.5) == pytest.approx(2 * delta_max(5, 2, 0.0, 1.0, 0.5))
    assert delta_max(5, 2, 0.0, 1.0, 0.01) == 0.0


def test_lambert_examples():
    assert lambert_w_minus1(-1 / math.e) == -1.0
    assert lambert_w_minus1(-0.1) == pytest.approx(-3.57715206395730, abs=1e-10)
    w = lambert_w_minus1(-0.05)
    assert w > math.e / (math.e - 1) * math.log(0.05)
    with pytest.raises(DomainError):
        lambert_w_minus1(0.0)
    with pytest.raises(DomainError):
        lambert_w_minus1(-0.5)


@settings(max_examples=300, deadline=None)
@given(y=st.floats(-1 / math.e, -1e-300, exclude_max=False))
def test_lambert_against_library(y):
    x = lambert_w_minus1(y)
    assert x <= -1.0
    assert x * math.exp(x) == pytest.approx(y, rel=1e-9, abs=1e-10)
    ref = complex(lambertw(y, -1))
    # the library gives nan at the rounded branch point
    if not math.isnan(ref.real):
        assert x == pytest.approx(ref.real, rel=1e-9, abs=1e-6)
    if y > -1 / math.e + 1e-12:
        assert x > math.e / (math.e - 1) * math.log(-y)


def width_grid():
    for B in range(1, 7):
        for alpha in range(2, 4**B):
            yield B, alpha, min(0.1, delta_max(5, alpha, 0.0, 1.0, 0.5) / 2)


def test_u_bounded_by_scaled_u_prime():
    for B, alpha, delta in width_grid():
        for c in (c_constant(B, alpha), c_constant_tight(B, alpha)):
            st_ = ConfidenceState(delta, 5, 0.5, B, 1.0)
            for i in range(1, 31):
                up, u = st_.advance(alpha**i)
                assert u <= 2 * c * up


def test_per_arm_term_value():
    assert per_arm_term(0.5, 0.125, 5, 0.1, 3, 2) == pytest.approx(468.273024703997, rel=1e-12)
    assert per_arm_term_unquantized(0.5, 0.125, 5, 0.1, 2) == pytest.approx(23.0940663803483, rel=1e-12)


def test_large_gap_limit():
    with pytest.warns(ICQWarning):
        assert per_arm_term(1e6, 0.5, 5, 0.1, 3, 2) == 1.0


def test_halving_gaps():
    for g in (0.05, 0.1, 0.3):
        a = per_arm_term(g, 0.5, 5, 0.1, 3, 2) - 1
        b = per_arm_term(g / 2, 0.5, 5, 0.1, 3, 2) - 1
        assert b >= 4 * a


def test_unquantized_bound_is_smaller():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ICQWarning)
        for B in (1, 2, 3, 5):
            for g in (0.01, 0.1, 0.5, 1.0, 5.0):
                for delta in (1e-6, 0.01, 0.1):
                    q = per_arm_term(g, 0.5, 5, delta, B, 2)
                    assert per_arm_term_unquantized(g, 0.5, 5, delta, 2) <= q


def test_sample_bound_report():
    rep = sample_bound([0.0, 0.5, 0.5, 0.5, 0.5], 0.125, 5, 0.1, 3, 2)
    assert rep.sample_bound == pytest.approx(4 * 468.273024703997)
    assert rep.round_bound == pytest.approx(4 * math.log(469.273024703997, 2))
    assert rep.bit_bound == 3 * rep.round_bound
    assert rep.delta_ok is False
    assert rep.per_arm_Tj == [512] * 4
    assert rep.unquantized_bound <= rep.sample_bound
    ok = sample_bound([0.0, 0.5], 0.5, 2, 0.1, 3, 2)
    assert ok.delta_ok


def test_zero_gap_is_infinite():
    rep = sample_bound([0.0, 0.0, 0.3], 0.5, 3, 0.1, 3, 2)
    assert math.isinf(rep.sample_bound) and math.isinf(rep.round_bound)
    with pytest.raises(ParameterError):
        sample_bound([0.1, 0.3], 0.5, 2, 0.1, 3, 2)


def test_oracle_examples():
    assert t_j_oracle(1e3, 0.5, 5, 0.1, 3, 2) == 2
    ts = [t_j_oracle(g, 0.5, 5, 0.1, 3, 2) for g in (0.05, 0.1, 0.2, 0.4, 0.8)]
    assert ts == sorted(ts, reverse=True)
    with pytest.raises(SearchExhaustedError):
        t_j_oracle(1e-300, 0.5, 5, 0.1, 3, 2)


def test_oracle_below_corrected_term():
    # with sqrt(4K/delta) in the log every grid point is covered
    for B, alpha, delta in width_grid():
        for g in (0.05, 0.25, 1.0):
            T = t_j_oracle(g, 0.5, 5, delta, B, alpha)
            assert T <= per_arm_term(g, 0.5, 5, delta, B, alpha, log_form="corrected")
