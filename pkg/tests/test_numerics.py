import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorentzcauchy.numerics import extrapolate_limit, tail_trend


@settings(max_examples=100, deadline=None)
@given(s=st.floats(-5, 5), c=st.floats(0.1, 5), b=st.floats(0, 10))
def test_lubkin_exact_on_harmonic_tails(s, c, b):
    n = np.arange(1, 30)
    assert extrapolate_limit(s + c / (n + b)) == pytest.approx(s, abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(s=st.floats(-5, 5), c=st.floats(0.1, 5), q=st.floats(0.2, 0.9))
def test_lubkin_exact_on_geometric_tails(s, c, q):
    n = np.arange(10)
    assert extrapolate_limit(s + c * q**n) == pytest.approx(s, abs=1e-8)


def test_columns_and_short_input():
    n = np.arange(1, 20)[:, None]
    seq = np.hstack([1 + 1 / n, 2 - 0.5**n, np.full_like(n, 3.0, dtype=float)])
    np.testing.assert_allclose(extrapolate_limit(seq), [1, 2, 3], atol=1e-9)
    assert extrapolate_limit([1.0, 2.0]) == 2.0


@pytest.mark.parametrize(
    "values, kind",
    [
        (np.ones(20), "flat"),
        (1 - 0.5 ** np.arange(20), "converging"),
        (np.arange(20.0), "diverging"),
        (np.arange(5.0), "inconclusive"),
    ],
)
def test_tail_trend_kinds(values, kind):
    assert tail_trend(values, 1e-12).kind == kind


def test_converging_trend_limit():
    t = tail_trend(1 - 1 / np.arange(2, 60), 1e-12)
    assert t.kind == "converging"
    assert t.limit == pytest.approx(1.0, abs=1e-9)
