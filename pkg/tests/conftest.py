import numpy as np
import pytest

from magflow import MagneticSystem, make_form, make_manifold

MODEL_NAMES = ["euclidean", "flat_torus", "poincare_disk", "poincare_ball",
               "round_sphere"]


def system(manifold, form="zero", manifold_params=None, **form_params):
    chart, metric = make_manifold(manifold, **(manifold_params or {}))
    sigma = make_form(form, chart.dim, metric, chart, **form_params)
    return MagneticSystem(chart, metric, sigma)


def unit(metric, x, v):
    v = np.asarray(v, dtype=float)
    return v / metric.norm(x, v)


@pytest.fixture(params=MODEL_NAMES)
def model(request):
    chart, metric = make_manifold(request.param)
    return request.param, chart, metric


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
