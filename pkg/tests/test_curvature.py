import numpy as np
import pytest

from magflow import (MetricField, anosov_report, magnetic_operator,
                     magnetic_sectional, make_manifold, op_A, op_R, riemann,
                     sectional)
from magflow.curvature import orthonormalize_pair
from magflow.errors import NonOrthonormalFrame, NonUnitVector
from magflow.geometry import gram_schmidt

from conftest import system, unit


# -- operator A ------------------------------------------------------------

def test_op_A_zero_form():
    sys = system("poincare_disk", "zero")
    x = np.zeros(2)
    A = op_A(sys, x, np.array([0.5, 0.0]))
    assert np.abs(A.matrix).max() < 1e-14


def test_op_A_planar_constant_field():
    # Y = b * rotation, so A = b^2 id on v-perp
    b = 1.5
    sys = system("euclidean", "constant", {"dim": 2}, b=b)
    A = op_A(sys, np.zeros(2), np.array([1.0, 0.0]))
    assert A.matrix == pytest.approx(np.array([[b * b]]), abs=1e-12)


def test_op_A_field_kernel_direction():
    # v = e3 lies in the kernel of Y: A = -(1/4) P Y^2 = (b^2/4) id on e1, e2
    b = 2.0
    sys = system("euclidean", "constant", {"dim": 3}, b=b)
    A = op_A(sys, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    assert np.abs(A.matrix - (b * b / 4) * np.eye(2)).max() < 1e-12


def test_op_A_requires_unit_vector():
    sys = system("euclidean", "constant", {"dim": 2}, b=1.0)
    with pytest.raises(NonUnitVector):
        op_A(sys, np.zeros(2), np.array([2.0, 0.0]))


# -- operator R ------------------------------------------------------------

def test_op_R_flat_constant():
    sys = system("euclidean", "constant", {"dim": 3}, b=1.0)
    R = op_R(sys, 1.0, np.zeros(3), np.array([1.0, 0.0, 0.0]))
    assert np.abs(R.matrix).max() < 1e-12


def test_op_R_disk_geodesic_case():
    sys = system("poincare_disk", "zero")
    R = op_R(sys, 1.0, np.zeros(2), np.array([0.5, 0.0]))
    assert R.matrix == pytest.approx(np.array([[-1.0]]), abs=1e-8)


def test_op_R_reduces_to_jacobi_operator(rng):
    # sigma = 0: R_s(w) = s^2 R(w, v)v, compared against the curvature tensor
    sys = system("poincare_ball", "zero")
    for s in (0.5, 2.0):
        x = sys.chart.sample_point(rng)
        gx = sys.metric(x)
        v = unit(sys.metric, x, rng.standard_normal(3))
        R = op_R(sys, s, x, v)
        tensor = riemann(sys.metric, x)
        for w in R.frame:
            expect = s * s * tensor.apply(v, w, v)
            assert np.abs(R.apply(w) - expect).max() < 1e-8


# -- combined operator and sectional curvature ------------------------------

def test_magnetic_operator_disk_area_form(rng):
    # hyperbolic surface with unit area form: M_s = (1 - s^2) id on v-perp
    sys = system("poincare_disk", "area_form", b=1.0)
    for s in (0.5, 1.0, 2.0):
        x = sys.chart.sample_point(rng)
        v = unit(sys.metric, x, rng.standard_normal(2))
        M = magnetic_operator(sys, s, x, v)
        assert M.matrix == pytest.approx(np.array([[1 - s * s]]), abs=1e-8)


def test_magnetic_sectional_flat_torus(rng):
    sys = system("flat_torus", "zero")
    x = sys.chart.sample_point(rng)
    v, w = gram_schmidt(sys.metric(x), rng.standard_normal((2, 2)))
    assert magnetic_sectional(sys, 1.0, x, v, w) == pytest.approx(0, abs=1e-12)


def test_magnetic_sectional_planar_field(rng):
    b = 0.8
    sys = system("euclidean", "constant", {"dim": 2}, b=b)
    x = sys.chart.sample_point(rng)
    v, w = gram_schmidt(np.eye(2), rng.standard_normal((2, 2)))
    for s in (0.5, 1.0, 3.0):
        assert magnetic_sectional(sys, s, x, v, w) == \
            pytest.approx(b * b, abs=1e-10)


def test_magnetic_sectional_rejects_skew_frames():
    sys = system("euclidean", "zero", {"dim": 2})
    with pytest.raises(NonOrthonormalFrame):
        magnetic_sectional(sys, 1.0, np.zeros(2), np.array([1.0, 0.0]),
                           np.array([0.5, 1.0]))


def test_orthonormalize_pair_helper(rng):
    sys = system("poincare_disk", "zero")
    x = np.array([0.2, 0.1])
    v, w = orthonormalize_pair(sys, x, rng.standard_normal(2),
                               rng.standard_normal(2))
    g = sys.metric(x)
    assert abs(v @ g @ v - 1) < 1e-12
    assert abs(w @ g @ w - 1) < 1e-12
    assert abs(v @ g @ w) < 1e-12


def test_geodesic_reduction_sectional(rng):
    # sigma = 0: magnetic sectional = s^2 * Riemannian sectional
    for name in ("poincare_ball", "round_sphere"):
        sys = system(name, "zero")
        for _ in range(100):
            x = sys.chart.sample_point(rng)
            pair = gram_schmidt(sys.metric(x),
                                rng.standard_normal((2, sys.dim)))
            if pair.shape[0] < 2:
                continue
            v, w = pair
            base = sectional(sys.metric, x, v, w)
            for s in (0.5, 2.0):
                assert magnetic_sectional(sys, s, x, v, w) == \
                    pytest.approx(s * s * base, abs=1e-8)


def test_sign_agreement_under_rescaling(rng):
    sys = system("poincare_disk", "area_form", b=1.0)
    for s in (0.5, 2.0):
        r = sys.rescale(s)
        for _ in range(10):
            x = sys.chart.sample_point(rng)
            v, w = gram_schmidt(sys.metric(x), rng.standard_normal((2, 2)))
            a = magnetic_sectional(sys, s, x, v, w)
            rv, rw = gram_schmidt(r.metric(x), rng.standard_normal((2, 2)))
            b = magnetic_sectional(r, 1.0, x, rv, rw)
            assert np.sign(round(a, 10)) == np.sign(round(b, 10))


def test_op_A_ignores_derivative_scheme(rng):
    # A depends on sigma and g pointwise only, not on their derivatives
    chart, g = make_manifold("poincare_disk")
    g_coarse = MetricField(g.raw, chart=chart, h1=1e-3, h2=1e-2)
    from magflow import MagneticSystem, make_form
    x = np.array([0.3, -0.2])
    out = []
    for met in (g, g_coarse):
        sig = make_form("area_form", 2, met, chart, b=1.0)
        sys = MagneticSystem(chart, met, sig)
        v = unit(met, x, np.array([1.0, 0.7]))
        out.append(op_A(sys, x, v).matrix)
    assert np.abs(out[0] - out[1]).max() < 1e-12


# -- Anosov sampling report ------------------------------------------------

def test_anosov_report_negative_regime():
    sys = system("poincare_disk", "area_form", b=1.0)
    rep = anosov_report(sys, 2.0, 50, seed=1)
    assert rep.max == pytest.approx(-3.0, abs=1e-6)
    assert rep.verdict == "criterion satisfied on sample"


def test_anosov_report_positive_regime():
    sys = system("poincare_disk", "area_form", b=1.0)
    rep = anosov_report(sys, 0.5, 50, seed=1)
    assert rep.max == pytest.approx(0.75, abs=1e-6)
    assert rep.verdict != "criterion satisfied on sample"


def test_anosov_report_flat_torus():
    sys = system("flat_torus", "zero")
    rep = anosov_report(sys, 1.0, 20, seed=1)
    assert abs(rep.max) < 1e-10 and abs(rep.min) < 1e-10
    assert rep.verdict != "criterion satisfied on sample"


def test_anosov_report_deterministic_json():
    sys = system("poincare_disk", "area_form", b=1.0)
    a = anosov_report(sys, 2.0, 10, seed=5).to_json()
    b = anosov_report(sys, 2.0, 10, seed=5).to_json()
    assert a == b
