import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icq.errors import EncodingError, ParameterError, ProtocolError
from icq.quantizer import (
    Interval,
    codeword_length,
    codeword_lengths,
    dec,
    decode_offsets,
    enc,
    encode_offset,
    error_bound,
    index_bits,
    nearest_offsets,
    range_bins,
    stochastic_offsets,
)

UNIT = Interval(0.0, 1.0)


def test_encode_example():
    # bins of width 0.25; 0.3 falls in the second one
    assert enc(0.3, 2, UNIT) == "01"
    assert dec("01", 2, UNIT) == 0.375


def test_error_bound_example():
    assert error_bound(3, Interval(0.0, 8.0)) == 0.5


def test_tie_goes_to_lower_bin():
    # 0.25 is equidistant from midpoints 0.125 and 0.375
    assert enc(0.25, 2, UNIT) == "00"
    assert enc(0.5, 1, UNIT) == "0"


def test_out_of_range_clamps():
    assert enc(-3.0, 3, UNIT) == "000"
    assert enc(7.0, 3, UNIT) == "111"


def test_bits_are_msb_first():
    assert enc(0.9, 3, UNIT) == "111"
    assert enc(0.6, 3, UNIT) == "100"


def test_rejects_non_finite():
    with pytest.raises(EncodingError):
        enc(math.nan, 2, UNIT)
    with pytest.raises(EncodingError):
        enc(math.inf, 2, UNIT)


def test_bad_arguments():
    with pytest.raises(ParameterError):
        enc(0.1, 0, UNIT)
    with pytest.raises(ParameterError):
        Interval(1.0, 1.0)
    with pytest.raises(ProtocolError):
        dec("0101", 3, UNIT)
    with pytest.raises(ProtocolError):
        dec("0a1", 3, UNIT)


@settings(max_examples=500, deadline=None)
@given(
    lo=st.floats(-1e6, 1e6),
    width=st.floats(1e-6, 1e6),
    frac=st.floats(0.0, 1.0),
    B=st.integers(1, 16),
)
def test_error_within_bound(lo, width, frac, B):
    iv = Interval(lo, lo + width)
    x = min(iv.lo + frac * iv.width, iv.hi)
    err = abs(dec(enc(x, B, iv), B, iv) - x)
    assert err <= error_bound(B, iv) * (1 + 1e-9) + 1e-12 * max(1.0, abs(lo))


@settings(max_examples=300, deadline=None)
@given(x=st.floats(-10, 10), B=st.integers(1, 10))
def test_nearest_midpoint(x, B):
    # brute force over all 2^B midpoints
    iv = Interval(-2.0, 3.0)
    mids = [dec(format(k, f"0{B}b"), B, iv) for k in range(2**B)]
    got = dec(enc(x, B, iv), B, iv)
    assert abs(got - x) == min(abs(m - x) for m in mids)


def test_fed_sel_grid():
    assert range_bins(0.0, 1.0, 0.1) == 10
    assert index_bits(10) == 4
    assert range_bins(0.0, 1.0, 2.0) == 1
    assert index_bits(1) == 1
    assert index_bits(2) == 1
    assert index_bits(3) == 2


def test_offset_codes():
    assert encode_offset(0) == "0"
    assert codeword_length(0) == 1
    for k in (-9, -1, 1, 2, 3, 4, 100, -1000):
        assert len(encode_offset(k)) == codeword_length(k) == 1 + 2 * math.ceil(math.log2(1 + abs(k)))
    ks = [0, 3, -1, 0, 17, -256]
    assert decode_offsets("".join(encode_offset(k) for k in ks)) == ks
    assert list(codeword_lengths(np.array(ks))) == [codeword_length(k) for k in ks]
    with pytest.raises(ProtocolError):
        decode_offsets("10")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-(2**20), 2**20), max_size=50))
def test_offset_roundtrip(ks):
    assert decode_offsets("".join(encode_offset(k) for k in ks)) == ks


def test_stochastic_rounding_is_unbiased():
    rng = np.random.default_rng(1)
    v = np.full(200_000, 0.3)
    ks = stochastic_offsets(v, 0.0, 1.0, rng)
    assert set(np.unique(ks)) == {0, 1}
    assert abs(ks.mean() - 0.3) < 0.005


def test_nearest_offsets():
    assert list(nearest_offsets(np.array([0.9, 1.0, -1.0, 3.1]), 0.0, 2.0)) == [0, 0, -1, 2]
