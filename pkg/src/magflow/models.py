"""Built-in model spaces.

Registry keys: "euclidean", "flat_torus", "poincare_disk", "poincare_ball",
"round_sphere".  Each builder returns (ChartSpec, MetricField) with analytic
first and second derivative closures, so the finite-difference scheme can be
used as an independent cross-check.
"""
from __future__ import annotations

import numpy as np

from .geometry import ChartSpec, MetricField

__all__ = ["make_manifold", "MANIFOLDS"]


def _euclidean(dim: int = 2):
    chart = ChartSpec(dim=dim, sample_bounds=(-2 * np.ones(dim), 2 * np.ones(dim)))
    eye = np.eye(dim)
    zero1 = np.zeros((dim, dim, dim))
    zero2 = np.zeros((dim, dim, dim, dim))
    metric = MetricField(lambda x: eye, dg=lambda x: zero1, d2g=lambda x: zero2,
                         chart=chart)
    return chart, metric


def _flat_torus(dim: int = 2, period: float = 2 * np.pi):
    chart = ChartSpec(dim=dim, periodic=[period] * dim,
                      sample_bounds=(np.zeros(dim), period * np.ones(dim)))
    eye = np.eye(dim)
    zero1 = np.zeros((dim, dim, dim))
    zero2 = np.zeros((dim, dim, dim, dim))
    metric = MetricField(lambda x: eye, dg=lambda x: zero1, d2g=lambda x: zero2,
                         chart=chart)
    return chart, metric


def _poincare(dim: int, eps: float = 1e-3):
    """Poincare disk/ball model: g = 4/(1 - |x|^2)^2 * id, curvature -1."""
    chart = ChartSpec(
        dim=dim,
        domain_guard=lambda x: float(x @ x) < (1.0 - eps) ** 2,
        sample_bounds=(-0.7 * np.ones(dim), 0.7 * np.ones(dim)),
    )
    eye = np.eye(dim)

    def conf(x):
        return 4.0 / (1.0 - x @ x) ** 2

    def eval_fn(x):
        return conf(x) * eye

    def dg(x):
        u = 1.0 - x @ x
        dcoef = 16.0 * x / u**3                       # d_k (4 u^-2)
        return np.einsum("ij,k->ijk", eye, dcoef)

    def d2g(x):
        u = 1.0 - x @ x
        d2coef = (16.0 / u**3) * np.eye(dim) + (96.0 / u**4) * np.outer(x, x)
        return np.einsum("ij,kl->ijkl", eye, d2coef)

    metric = MetricField(eval_fn, dg=dg, d2g=d2g, chart=chart)
    return chart, metric


def _round_sphere(dim: int = 2, eps: float = 0.2):
    """Unit round sphere in hyperspherical angles (theta_1, ..., theta_dim).

    g is diagonal with g_ii = prod_{j < i} sin^2(theta_j).  The chart guard
    keeps all polar angles away from the coordinate singularities.
    """
    lo = eps * np.ones(dim)
    hi = (np.pi - eps) * np.ones(dim)

    def guard(x):
        return bool(np.all(x[:-1] > eps) and np.all(x[:-1] < np.pi - eps))

    chart = ChartSpec(dim=dim, domain_guard=guard,
                      periodic=[None] * (dim - 1) + [2 * np.pi],
                      sample_bounds=(lo, hi))

    def eval_fn(x):
        g = np.ones(dim)
        for i in range(1, dim):
            g[i] = g[i - 1] * np.sin(x[i - 1]) ** 2
        return np.diag(g)

    def _diag(x):
        g = np.ones(dim)
        for i in range(1, dim):
            g[i] = g[i - 1] * np.sin(x[i - 1]) ** 2
        return g

    def dg(x):
        g = _diag(x)
        out = np.zeros((dim, dim, dim))
        cot = np.zeros(dim)
        cot[:-1] = 1.0 / np.tan(x[:-1])
        for i in range(dim):
            for k in range(i):
                out[i, i, k] = 2.0 * g[i] * cot[k]
        return out

    def d2g(x):
        g = _diag(x)
        out = np.zeros((dim, dim, dim, dim))
        cot = np.zeros(dim)
        csc2 = np.zeros(dim)
        cot[:-1] = 1.0 / np.tan(x[:-1])
        csc2[:-1] = 1.0 / np.sin(x[:-1]) ** 2
        for i in range(dim):
            for k in range(i):
                for l in range(i):
                    if k == l:
                        out[i, i, k, k] = g[i] * (4 * cot[k] ** 2 - 2 * csc2[k])
                    else:
                        out[i, i, k, l] = 4.0 * g[i] * cot[k] * cot[l]
        return out

    metric = MetricField(eval_fn, dg=dg, d2g=d2g, chart=chart)
    return chart, metric


MANIFOLDS = {
    "euclidean": _euclidean,
    "flat_torus": _flat_torus,
    "poincare_disk": lambda **kw: _poincare(dim=2, **kw),
    "poincare_ball": lambda dim=3, **kw: _poincare(dim=dim, **kw),
    "round_sphere": _round_sphere,
}


def make_manifold(name: str, **params):
    try:
        builder = MANIFOLDS[name]
    except KeyError:
        raise KeyError(f"unknown manifold {name!r}; known: {sorted(MANIFOLDS)}")
    return builder(**params)
