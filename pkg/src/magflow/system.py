"""The magnetic system: metric + closed 2-form, the Lorentz force operator,
its covariant derivative, closedness checking, and speed rescaling.
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import NonpositiveSpeed
from .forms import TwoFormField
from .geometry import ChartSpec, MetricField, christoffel

__all__ = ["MagneticSystem", "closedness_residual"]

_CLOSEDNESS_STRICT_TOL = 1e-8


def closedness_residual(sigma: TwoFormField, x) -> float:
    """Max-norm of (d sigma)_kij = d_k s_ij + d_i s_jk + d_j s_ki at x."""
    ds = sigma.dsigma(x)
    d = (np.einsum("ijk->kij", ds) + np.einsum("jki->kij", ds)
         + np.einsum("kij->kij", ds))
    return float(np.max(np.abs(d)))


class MagneticSystem:
    """A chart, a metric, a closed 2-form, and an optional custom vertical
    field for general semi-spray flows (defaults to the Lorentz force Yv).
    """

    def __init__(self, chart: ChartSpec, metric: MetricField,
                 sigma: TwoFormField,
                 vertical_field: Optional[Callable] = None,
                 strict: bool = False, strict_samples: int = 20,
                 strict_seed: int = 0):
        self.chart = chart
        self.metric = metric
        self.sigma = sigma
        self.vertical_field = vertical_field
        if strict:
            rng = np.random.default_rng(strict_seed)
            worst = max(closedness_residual(sigma, chart.sample_point(rng))
                        for _ in range(strict_samples))
            if worst > _CLOSEDNESS_STRICT_TOL:
                raise ValueError(
                    f"2-form closedness residual {worst:.3e} exceeds "
                    f"{_CLOSEDNESS_STRICT_TOL} in strict mode")

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def is_magnetic(self) -> bool:
        """True when the vertical field is the default Lorentz force."""
        return self.vertical_field is None

    # -- Lorentz force ----------------------------------------------------

    def lorentz(self, x) -> np.ndarray:
        """Y with g(Yv, w) = sigma(v, w); as a matrix, g Y = sigma^T."""
        self.chart.require(x)
        return -np.linalg.solve(self.metric(x), self.sigma(x))

    def dlorentz(self, x) -> np.ndarray:
        """dY[:, :, k] = d_k Y, from d_k(g Y) = d_k sigma^T."""
        g = self.metric(x)
        dg = self.metric.dg(x)
        ds = self.sigma.dsigma(x)
        Y = -np.linalg.solve(g, self.sigma(x))
        ginv = np.linalg.inv(g)
        # Y = -g^-1 sigma  =>  d_k Y = g^-1 d_k g g^-1 sigma - g^-1 d_k sigma
        return np.einsum("ia,abk,bj->ijk", ginv, dg, -Y) \
            - np.einsum("ia,ajk->ijk", ginv, ds)

    def nabla_lorentz(self, x, w) -> np.ndarray:
        """(nabla_w Y) = d_w Y + [Gamma(w), Y]."""
        w = np.asarray(w, dtype=float)
        Y = self.lorentz(x)
        dY = np.einsum("ijk,k->ij", self.dlorentz(x), w)
        Gw = np.einsum("ikj,k->ij", christoffel(self.metric, x), w)
        return dY + Gw @ Y - Y @ Gw

    # -- vertical field ---------------------------------------------------

    def x_vertical(self, x, v) -> np.ndarray:
        if self.vertical_field is not None:
            return np.asarray(self.vertical_field(x, v), dtype=float)
        return self.lorentz(x) @ np.asarray(v, dtype=float)

    # -- rescaling --------------------------------------------------------

    def rescale(self, s: float) -> "MagneticSystem":
        """The system (s^-2 g, s^-2 sigma), whose unit-speed flow reproduces
        the original flow at speed s."""
        if s <= 0:
            raise NonpositiveSpeed(f"speed must be positive, got {s}")
        if s == 1.0:
            return self
        c = s ** -2
        m = self.metric
        metric = MetricField(lambda x: c * m.raw(x),
                             dg=lambda x: c * m.dg(x),
                             d2g=lambda x: c * m.d2g(x),
                             h1=m.h1, h2=m.h2, chart=self.chart)
        sg = self.sigma
        sigma = TwoFormField(lambda x: c * sg.raw(x),
                             dsigma=lambda x: c * sg.dsigma(x),
                             h1=sg.h1, chart=self.chart)
        return MagneticSystem(self.chart, metric, sigma,
                              vertical_field=self.vertical_field)
