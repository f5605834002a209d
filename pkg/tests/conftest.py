import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from revbispec import FilterCoefficients, InnovationSpec, LinearModel

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def model(values, k_min=0, innovations=None, name=None):
    innovations = innovations or InnovationSpec.centered_exponential(1.0)
    return LinearModel(FilterCoefficients(k_min, tuple(float(v) for v in values)), innovations, name)


def gamma2():
    """Innovations with cum3 = 2 and variance 1."""
    return InnovationSpec.centered_gamma(1.0, 1.0)


_coef = st.floats(-1.0, 1.0, allow_nan=False).filter(lambda v: abs(v) > 1e-3)


@st.composite
def filters(draw, max_width=7):
    w = draw(st.integers(1, max_width))
    vals = [draw(_coef) for _ in range(w)]
    k_min = draw(st.integers(-4, 4))
    return FilterCoefficients(k_min, tuple(vals))


@st.composite
def symmetric_filters(draw, max_width=7):
    w = draw(st.integers(1, max_width))
    half = [draw(_coef) for _ in range((w + 1) // 2)]
    vals = half + half[::-1][w % 2:]
    return FilterCoefficients(draw(st.integers(-4, 4)), tuple(vals))


@st.composite
def skew_symmetric_filters(draw, max_width=7):
    w = draw(st.integers(2, max_width))
    half = [draw(_coef) for _ in range(w // 2)]
    vals = half + ([0.0] if w % 2 else []) + [-v for v in half[::-1]]
    return FilterCoefficients(draw(st.integers(-4, 4)), tuple(vals))


@pytest.fixture
def ma1():
    return model([1.0, 1.0])


@pytest.fixture
def ma_asym():
    return model([1.0, 0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
