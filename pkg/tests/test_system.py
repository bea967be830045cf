import numpy as np
import pytest

from magflow import MagneticSystem, christoffel, closedness_residual, make_form, make_manifold
from magflow.errors import NonpositiveSpeed

from conftest import system


ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


# -- Lorentz operator ------------------------------------------------------

def test_lorentz_zero_form():
    sys = system("poincare_disk", "zero")
    assert np.allclose(sys.lorentz(np.array([0.2, 0.1])), 0, atol=1e-15)


def test_lorentz_constant_form_is_rotation_generator():
    sys = system("euclidean", "constant", {"dim": 2}, b=1.0)
    assert np.allclose(sys.lorentz(np.zeros(2)), ROT, atol=1e-14)


def test_lorentz_area_form_squares_to_minus_identity(rng):
    sys = system("poincare_disk", "area_form", b=1.0)
    for _ in range(5):
        x = sys.chart.sample_point(rng)
        Y = sys.lorentz(x)
        assert np.abs(Y @ Y + np.eye(2)).max() < 1e-10


def test_lorentz_matches_sigma_and_is_skew(rng):
    for name, form, kw in [("euclidean", "constant", {"b": 0.7}),
                           ("poincare_disk", "area_form", {"b": 1.3}),
                           ("flat_torus", "constant", {"b": 2.0})]:
        sys = system(name, form, **kw)
        for _ in range(100):
            x = sys.chart.sample_point(rng)
            g, Y, sig = sys.metric(x), sys.lorentz(x), sys.sigma(x)
            v, w = rng.standard_normal((2, sys.dim))
            assert abs(v @ g @ (Y @ w) + (Y @ v) @ g @ w) < 1e-10
            assert abs((Y @ v) @ g @ w - sig @ w @ v) < 1e-12


# -- covariant derivative of Y ---------------------------------------------

def test_nabla_lorentz_constant_flat_zero():
    sys = system("euclidean", "constant", {"dim": 2}, b=1.0)
    assert np.allclose(sys.nabla_lorentz(np.zeros(2), np.array([1.0, 2.0])),
                       0, atol=1e-14)


def test_nabla_lorentz_area_form_parallel(rng):
    # the Riemannian area form is parallel, so nabla Y = 0
    sys = system("poincare_disk", "area_form", b=1.0)
    for _ in range(5):
        x = sys.chart.sample_point(rng)
        w = rng.standard_normal(2)
        assert np.abs(sys.nabla_lorentz(x, w)).max() < 1e-6


def test_nabla_lorentz_linear_coefficient_flat():
    # sigma = x^1 dx^dy on flat space: nabla_{e1} Y = d_1 Y = rotation
    chart, metric = make_manifold("euclidean", dim=2)
    from magflow.forms import TwoFormField
    sig = TwoFormField(lambda x: x[0] * np.array([[0.0, 1.0], [-1.0, 0.0]]),
                       chart=chart)
    sys = MagneticSystem(chart, metric, sig)
    nab = sys.nabla_lorentz(np.array([0.5, 0.2]), np.array([1.0, 0.0]))
    assert np.allclose(nab, ROT, atol=1e-9)


def test_nabla_lorentz_is_linear_in_w(rng):
    sys = system("poincare_disk", "area_form", b=1.0)
    x = np.array([0.3, -0.1])
    for _ in range(5):
        w1, w2 = rng.standard_normal((2, 2))
        a = rng.standard_normal()
        lhs = sys.nabla_lorentz(x, a * w1 + w2)
        rhs = a * sys.nabla_lorentz(x, w1) + sys.nabla_lorentz(x, w2)
        assert np.abs(lhs - rhs).max() < 1e-10


# -- closedness ------------------------------------------------------------

def test_closedness_constant_form():
    sys = system("euclidean", "constant", {"dim": 3}, b=2.0)
    assert closedness_residual(sys.sigma, np.zeros(3)) == pytest.approx(0, abs=1e-14)


def test_closedness_any_surface_form():
    sys = system("poincare_disk", "area_form", b=1.0)
    assert closedness_residual(sys.sigma, np.array([0.2, 0.3])) == \
        pytest.approx(0, abs=1e-14)


def test_closedness_nonclosed_example():
    # sigma = x^3 dx^1 ^ dx^2 has d sigma = dx^3 ^ dx^1 ^ dx^2, residual 1
    from magflow.forms import TwoFormField
    def coeff(x):
        s = np.zeros((3, 3))
        s[0, 1], s[1, 0] = x[2], -x[2]
        return s
    sig = TwoFormField(coeff)
    assert closedness_residual(sig, np.array([0.1, 0.2, 0.3])) == \
        pytest.approx(1.0, abs=1e-9)


# -- rescaling -------------------------------------------------------------

def test_rescale_identity_at_one():
    sys = system("euclidean", "constant", {"dim": 2}, b=1.0)
    assert sys.rescale(1.0) is sys


def test_rescale_scales_metric_and_form():
    sys = system("euclidean", "constant", {"dim": 2}, b=1.0)
    r = sys.rescale(2.0)
    x = np.array([0.4, -0.3])
    assert np.allclose(r.metric(x), np.eye(2) / 4, atol=1e-14)
    assert np.allclose(r.sigma(x), sys.sigma(x) / 4, atol=1e-14)
    # Y = g^-1 sigma-hat is invariant under the common scaling
    assert np.abs(r.lorentz(x) - sys.lorentz(x)).max() < 1e-12


def test_rescale_preserves_christoffel(rng):
    sys = system("poincare_disk", "area_form", b=1.0)
    r = sys.rescale(0.5)
    for _ in range(5):
        x = sys.chart.sample_point(rng)
        assert np.abs(christoffel(sys.metric, x)
                      - christoffel(r.metric, x)).max() < 1e-8


def test_rescale_rejects_nonpositive_speed():
    sys = system("euclidean", "zero", {"dim": 2})
    with pytest.raises(NonpositiveSpeed):
        sys.rescale(-1.0)


def test_rescaled_lorentz_identical_on_models(rng):
    for name, form, kw in [("euclidean", "constant", {"b": 1.0}),
                           ("poincare_disk", "area_form", {"b": 1.0})]:
        sys = system(name, form, **kw)
        for s in (0.5, 2.0):
            r = sys.rescale(s)
            for _ in range(10):
                x = sys.chart.sample_point(rng)
                assert np.abs(r.lorentz(x) - sys.lorentz(x)).max() < 1e-12
