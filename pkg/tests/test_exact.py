import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rotsub.cf import PartialQuotients
from rotsub.exact import Surd, as_point, squarefree_part, to_exact

small = st.integers(min_value=-50, max_value=50)
surds = st.builds(Surd, small, small, st.integers(min_value=1, max_value=30), st.sampled_from([2, 3, 5]))


def test_squarefree_part():
    assert squarefree_part(12) == (2, 3)
    assert squarefree_part(72) == (6, 2)
    assert squarefree_part(7) == (1, 7)


def test_golden_and_sqrt2_values():
    golden = to_exact(PartialQuotients.periodic((1,)))
    assert golden == Surd(-1, 1, 2, 5)
    assert golden * golden + golden == 1
    root2 = to_exact(PartialQuotients.periodic((2,)))
    assert root2 == Surd(-1, 1, 1, 2)


@given(surds, surds)
def test_arithmetic_agrees_with_floats(x, y):
    d = max(x.d, y.d)
    x, y = Surd(x.a, x.b, x.c, d), Surd(y.a, y.b, y.c, d)
    assert math.isclose(float(x + y), float(x) + float(y), abs_tol=1e-9)
    assert math.isclose(float(x * y), float(x) * float(y), rel_tol=1e-9, abs_tol=1e-9)
    if x != 0:
        assert math.isclose(float(y / x), float(y) / float(x), rel_tol=1e-9, abs_tol=1e-9)


@given(surds, surds)
def test_order_is_exact(x, y):
    d = max(x.d, y.d)
    x, y = Surd(x.a, x.b, x.c, d), Surd(y.a, y.b, y.c, d)
    assert (x < y) == ((x - y).sign() < 0)
    if abs(float(x) - float(y)) > 1e-9:
        assert (x < y) == (float(x) < float(y))


@given(surds)
def test_floor_and_frac(x):
    f = math.floor(x)
    assert f <= x < f + 1
    assert 0 <= x.frac() < 1


def test_as_point_parses_fractions():
    assert as_point("1/3") == Surd(1, 0, 3)
    assert as_point(Fraction(2, 4)) == Surd(1, 0, 2)
    with pytest.raises(TypeError):
        as_point(0.5)
