import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schwarzlab.errors import DomainError
from schwarzlab.roots import invert_increasing


@given(st.floats(-50, 50))
def test_inverts_cubic(y):
    x = invert_increasing(lambda t: t ** 3 + t, y, -10.0, 1.0, dfun=lambda t: 3 * t ** 2 + 1)
    assert x ** 3 + x == pytest.approx(y, abs=1e-12 * max(1, abs(y)))


@given(st.floats(1e-3, 1e6))
def test_bracket_grows_to_target(y):
    x = invert_increasing(np.log1p, math.log1p(y), 0.0, 1e-3)
    assert x == pytest.approx(y, rel=1e-13)


def test_vectorized_matches_scalar():
    ys = np.linspace(0.1, 20, 50)
    xs = invert_increasing(np.sinh, ys, 0.0, 1.0, dfun=np.cosh)
    assert xs.shape == ys.shape
    np.testing.assert_allclose(np.sinh(xs), ys, rtol=1e-14)
    assert invert_increasing(np.sinh, 3.0, 0.0, 1.0) == pytest.approx(math.asinh(3.0), rel=1e-15)


def test_exact_endpoint():
    assert invert_increasing(lambda t: t, 0.0, 0.0, 1.0) == 0.0


def test_target_below_bracket():
    with pytest.raises(DomainError):
        invert_increasing(lambda t: t, -1.0, 0.0, 1.0)


def test_bounded_function_cannot_be_bracketed():
    with pytest.raises(DomainError):
        invert_increasing(np.arctan, 2.0, 0.0, 1.0)


def test_bad_newton_steps_are_safeguarded():
    # derivative off by a large factor: Newton alone would overshoot
    x = invert_increasing(lambda t: t ** 3, 8.0, 0.0, 10.0, dfun=lambda t: 1e-6 + 0 * t)
    assert x == pytest.approx(2.0, rel=1e-14)
