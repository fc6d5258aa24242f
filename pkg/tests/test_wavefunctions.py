import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from quantile_motion.errors import InvalidInputError
from quantile_motion.wavefunctions import (FreeGaussian, HarmonicSuperposition, PhysicalConstants,
                                           SquareWellSuperposition, TwoSlit, density, eval_dpsi_dx,
                                           eval_psi, make_model)

MODELS = [HarmonicSuperposition(), FreeGaussian(), TwoSlit(), SquareWellSuperposition()]


def test_free_gaussian_prefactor_at_origin():
    assert eval_psi(FreeGaussian(a=math.pi / 2), 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert density(FreeGaussian(a=math.pi / 2), 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_harmonic_at_origin_is_ground_state_only():
    a = 1 / math.sqrt(3)
    expected = math.sqrt(0.5) * math.sqrt(1 / (a * math.sqrt(math.pi)))
    assert eval_psi(HarmonicSuperposition(omega=3), 0.0, 0.0) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("t", [0.0, 0.3, 1.7])
def test_well_vanishes_at_wall(t):
    assert eval_psi(SquareWellSuperposition(L=1), 0.0, t) == 0


def test_free_gaussian_flat_at_center():
    assert eval_dpsi_dx(FreeGaussian(), 0.0, 0.0) == 0


def test_well_slope_at_midpoint():
    assert eval_dpsi_dx(SquareWellSuperposition(L=1), 0.5, 0.0) == pytest.approx(-2 * math.pi, rel=1e-14)


@pytest.mark.parametrize("a", [0.5, math.pi / 2, 3.0])
@pytest.mark.parametrize("t", [0.0, 0.4, 2.0])
def test_free_gaussian_variance(a, t):
    m = FreeGaussian(a=a)
    second = quad(lambda x: x**2 * m.density(x, t), -np.inf, np.inf, epsabs=1e-13)[0]
    assert second == pytest.approx((1 + (2 * a * t) ** 2) / (4 * a), rel=1e-9)
    assert m.variance(t) == pytest.approx(second, rel=1e-9)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind)
@pytest.mark.parametrize("frac", [0.0, 0.37, 1.0])
def test_normalization(model, frac):
    t = frac * model.default_t_max
    lo, hi = model.default_range
    x = np.linspace(lo, hi, 20001)
    assert np.trapezoid(model.density(x, t), x) == pytest.approx(1.0, abs=1e-4)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(MODELS), st.floats(0.02, 0.98), st.floats(0.0, 1.0))
def test_derivative_matches_central_differences(model, u, s):
    lo, hi = model.default_range
    x = lo + u * (hi - lo)
    t = s * model.default_t_max
    h = 1e-5 * (hi - lo) / 10
    fd = (model.psi(x + h, t) - model.psi(x - h, t)) / (2 * h)
    exact = model.dpsi_dx(x, t)
    scale = max(abs(exact), abs(model.psi(x, t)) / (hi - lo), 1e-8)
    assert abs(fd - exact) <= 1e-6 * scale


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 129.668), st.floats(0, 100))
def test_two_slit_symmetric(y, t):
    m = TwoSlit()
    assert m.density(y, t) == pytest.approx(m.density(-y, t), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind)
def test_density_nonnegative(model):
    lo, hi = model.default_range
    x = np.linspace(lo - 1, hi + 1, 301)
    t = np.linspace(0, model.default_t_max, 11)[:, None]
    assert np.all(model.density(x, t) >= 0)


def test_two_slit_negligible_outside_range():
    m = TwoSlit()
    y = np.linspace(-129.668, 129.668, 4001)
    for t in np.linspace(0, 100, 41):
        d = m.density(y, t)
        assert max(d[0], d[-1]) <= 1e-8 * d.max()


@pytest.mark.parametrize("bad", [dict(x=np.nan, t=0.0), dict(x=0.0, t=np.inf), dict(x=0.0, t=-1.0)])
def test_invalid_points_rejected(bad):
    with pytest.raises(InvalidInputError):
        eval_psi(FreeGaussian(), bad["x"], bad["t"])


@pytest.mark.parametrize("cls,kw", [(HarmonicSuperposition, dict(omega=0)), (FreeGaussian, dict(a=-1)),
                                    (SquareWellSuperposition, dict(L=0)),
                                    (TwoSlit, dict(t_max=0))])
def test_parameters_must_be_positive(cls, kw):
    with pytest.raises(InvalidInputError):
        cls(**kw)


def test_constants_must_be_positive():
    with pytest.raises(InvalidInputError):
        PhysicalConstants(hbar=0.0)


def test_make_model():
    m = make_model("harmonic", omega=2.0, mass=2.0)
    assert isinstance(m, HarmonicSuperposition) and m.omega == 2.0 and m.constants.mass == 2.0
    with pytest.raises(InvalidInputError):
        make_model("nope")
    with pytest.raises(InvalidInputError):
        make_model("free", omega=1.0)


def test_stationary_ground_state_density_is_time_independent():
    m = HarmonicSuperposition(coefficients=(1.0, 0.0))
    x = np.linspace(-3, 3, 61)
    np.testing.assert_allclose(m.density(x, 1.234), m.density(x, 0.0), rtol=1e-14)
