from fractions import Fraction

import pytest
from hypothesis import strategies as st

from defml import kernels
from defml.exact import BivarPoly

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def bivar_polys(draw, max_deg_y=4, max_deg_h=3, max_terms=5):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        key = (draw(st.integers(0, max_deg_y)), draw(st.integers(0, max_deg_h)))
        terms[key] = draw(rationals)
    return BivarPoly(terms)


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    """Kernel table for each backend, so numba and numpy paths are both exercised."""
    return kernels.BACKENDS[request.param]


@pytest.fixture
def half():
    return Fraction(1, 2)
