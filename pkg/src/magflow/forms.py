"""Magnetic 2-form fields and the built-in form registry.

Registry keys: "zero", "constant" (strength b on the x1x2-plane), and
"area_form" (Riemannian area form, surfaces only).
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .geometry import ChartSpec, MetricField

__all__ = ["TwoFormField", "make_form", "FORMS"]


class TwoFormField:
    """Antisymmetric coefficient field sigma_ij(x) with derivative scheme."""

    def __init__(self, eval_fn, dsigma=None, h1: float = 1e-5,
                 chart: Optional[ChartSpec] = None):
        self._eval = eval_fn
        self._dsigma = dsigma
        self.h1 = h1
        self.chart = chart

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.chart is not None:
            self.chart.require(x)
        return np.asarray(self._eval(x), dtype=float)

    def raw(self, x) -> np.ndarray:
        return np.asarray(self._eval(np.asarray(x, dtype=float)), dtype=float)

    def dsigma(self, x) -> np.ndarray:
        """dsig[i, j, k] = d sigma_ij / d x^k."""
        x = np.asarray(x, dtype=float)
        if self._dsigma is not None:
            return np.asarray(self._dsigma(x), dtype=float)
        n = x.size
        out = np.empty((n, n, n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = self.h1
            out[:, :, k] = (self.raw(x + e) - self.raw(x - e)) / (2 * self.h1)
        return out


def _zero(dim: int, chart=None, **_):
    z1 = np.zeros((dim, dim))
    z2 = np.zeros((dim, dim, dim))
    return TwoFormField(lambda x: z1, dsigma=lambda x: z2, chart=chart)


def _constant(dim: int, b: float = 1.0, chart=None, **_):
    """b * dx^1 ^ dx^2, extended by zero in any further coordinates."""
    sig = np.zeros((dim, dim))
    sig[0, 1] = b
    sig[1, 0] = -b
    z2 = np.zeros((dim, dim, dim))
    return TwoFormField(lambda x: sig, dsigma=lambda x: z2, chart=chart)


def _area_form(dim: int, metric: MetricField = None, b: float = 1.0,
               chart=None, **_):
    """b times the Riemannian area form sqrt(det g) dx^1 ^ dx^2 (dim 2)."""
    if dim != 2:
        raise ValueError("area_form is only defined on surfaces")
    if metric is None:
        raise ValueError("area_form needs the metric")

    def eval_fn(x):
        c = b * np.sqrt(np.linalg.det(metric.raw(x)))
        return np.array([[0.0, c], [-c, 0.0]])

    def dsigma(x):
        g = metric.raw(x)
        dg = metric.dg(x)
        det = np.linalg.det(g)
        ginv = np.linalg.inv(g)
        # d_k sqrt(det g) = 0.5 sqrt(det g) tr(g^-1 d_k g)
        dsq = 0.5 * np.sqrt(det) * np.einsum("ij,jik->k", ginv, dg)
        out = np.zeros((2, 2, 2))
        out[0, 1, :] = b * dsq
        out[1, 0, :] = -b * dsq
        return out

    return TwoFormField(eval_fn, dsigma=dsigma, chart=chart)


FORMS = {
    "zero": _zero,
    "constant": _constant,
    "area_form": _area_form,
}


def make_form(name: str, dim: int, metric: MetricField = None,
              chart: ChartSpec = None, **params) -> TwoFormField:
    try:
        builder = FORMS[name]
    except KeyError:
        raise KeyError(f"unknown 2-form {name!r}; known: {sorted(FORMS)}")
    return builder(dim=dim, metric=metric, chart=chart, **params)
