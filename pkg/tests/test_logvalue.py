import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ucs_entropy import LogValue
from ucs_entropy.logvalue import iroot


def test_canonical_form():
    assert LogValue(4, 2) == LogValue(2, 1)
    assert LogValue(8, 6) == LogValue(2, 2)
    assert (LogValue(1, 7).p, LogValue(1, 7).k) == (1, 1)
    assert LogValue(6, 4).k == 4


def test_rendering():
    assert LogValue(2, 4).exact_str() == "(1/4)*log2(2)"
    assert str(LogValue(2, 4)) == "exact=(1/4)*log2(2)\tdecimal=0.250000000000"
    assert LogValue(1).exact_str() == "0"
    assert LogValue(3, 2).decimal_str() == "0.792481250361"


def test_exact_tie_resolution():
    # 1/2 log2 2 and 1/4 log2 4 are the same number
    assert LogValue(2, 2) == LogValue(4, 4)
    assert not LogValue(2, 2) < LogValue(4, 4)
    assert LogValue(3, 2) < LogValue(2, 1)
    assert max(LogValue(2, 4), LogValue(2, 2), LogValue(1)) == LogValue(2, 2)


def test_invalid():
    with pytest.raises(ValueError):
        LogValue(0)
    with pytest.raises(ValueError):
        LogValue(2, 0)


@given(st.integers(0, 10**40), st.integers(1, 7))
def test_iroot(n, d):
    r = iroot(n, d)
    assert r**d <= n < (r + 1) ** d


@given(st.integers(1, 10**6), st.integers(1, 12), st.integers(1, 10**6), st.integers(1, 12))
def test_order_matches_floats_when_far_apart(p1, k1, p2, k2):
    a, b = LogValue(p1, k1), LogValue(p2, k2)
    fa, fb = math.log2(p1) / k1, math.log2(p2) / k2
    if abs(fa - fb) > 1e-9:
        assert (a < b) == (fa < fb)
    assert (a == b) == (p1**k2 == p2**k1)
