"""Chart-based Riemannian geometry: metrics, Christoffel symbols, curvature,
and tangent-space linear algebra.

Everything lives in a single coordinate chart.  A metric is a coefficient
function x -> g_ij(x) together with derivative closures (analytic where the
built-in models provide them, central finite differences otherwise).

Index conventions used throughout:
    dg[i, j, k]      = d g_ij / d x^k
    d2g[i, j, k, l]  = d^2 g_ij / d x^k d x^l
    Gamma[i, j, k]   = Gamma^i_{jk}
    R.up[i, j, k, l] = R^i_{jkl}, the coefficient of (R(e_k, e_l) e_j)^i
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegeneratePlane,
    DomainViolation,
    ZeroVector,
)

__all__ = [
    "ChartSpec",
    "MetricField",
    "CurvatureTensor",
    "TangentSplit",
    "christoffel",
    "dchristoffel",
    "riemann",
    "sectional",
    "project",
    "connector_split",
    "connector_reconstruct",
    "orthonormal_completion",
    "gram_schmidt",
]

_GS_SKIP = 1e-8  # near-parallel seed threshold for Gram-Schmidt


@dataclass(frozen=True)
class ChartSpec:
    """A single coordinate chart with an optional domain guard.

    periodic, when given, lists a period length per coordinate (None for
    non-periodic coordinates); it is only used by samplers and output
    wrapping, never by the integrators themselves.
    """

    dim: int
    domain_guard: Optional[Callable[[np.ndarray], bool]] = None
    periodic: Optional[Sequence[Optional[float]]] = None
    # box used by random samplers: (low, high) arrays
    sample_bounds: Optional[tuple] = None

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("chart dimension must be at least 2")
        if self.periodic is not None:
            for p in self.periodic:
                if p is not None and p <= 0:
                    raise ValueError("periods must be strictly positive")

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        if self.domain_guard is None:
            return True
        return bool(self.domain_guard(x))

    def require(self, x):
        if not self.contains(np.asarray(x, dtype=float)):
            raise DomainViolation(f"point {x} outside chart domain")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        lo, hi = self.sample_bounds if self.sample_bounds is not None else (
            -np.ones(self.dim), np.ones(self.dim))
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        for _ in range(1000):
            x = rng.uniform(lo, hi)
            if self.contains(x):
                return x
        raise DomainViolation("could not sample a point inside the guard")


class MetricField:
    """Symmetric positive-definite coefficient field g_ij(x).

    dg / d2g are optional analytic closures; when absent, central
    differences with steps h1 (first order) and h2 (second order) are used.
    """

    def __init__(self, eval_fn, dg=None, d2g=None, h1: float = 1e-5,
                 h2: float = 1e-4, chart: Optional[ChartSpec] = None):
        self._eval = eval_fn
        self._dg = dg
        self._d2g = d2g
        self.h1 = h1
        self.h2 = h2
        self.chart = chart

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.chart is not None:
            self.chart.require(x)
        g = np.asarray(self._eval(x), dtype=float)
        return g

    def raw(self, x) -> np.ndarray:
        """Evaluate without the domain guard (used inside FD stencils)."""
        return np.asarray(self._eval(np.asarray(x, dtype=float)), dtype=float)

    def dg(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._dg is not None:
            return np.asarray(self._dg(x), dtype=float)
        n = x.size
        out = np.empty((n, n, n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = self.h1
            out[:, :, k] = (self.raw(x + e) - self.raw(x - e)) / (2 * self.h1)
        return out

    def d2g(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._d2g is not None:
            return np.asarray(self._d2g(x), dtype=float)
        n = x.size
        h = self.h2
        out = np.empty((n, n, n, n))
        g0 = self.raw(x)
        for k in range(n):
            ek = np.zeros(n)
            ek[k] = h
            out[:, :, k, k] = (self.raw(x + ek) - 2 * g0 + self.raw(x - ek)) / h**2
            for l in range(k + 1, n):
                el = np.zeros(n)
                el[l] = h
                mixed = (self.raw(x + ek + el) - self.raw(x + ek - el)
                         - self.raw(x - ek + el) + self.raw(x - ek - el)) / (4 * h**2)
                out[:, :, k, l] = mixed
                out[:, :, l, k] = mixed
        return out

    def norm(self, x, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.sqrt(max(v @ self(x) @ v, 0.0)))

    def inner(self, x, v, w) -> float:
        return float(np.asarray(v, dtype=float) @ self(x) @ np.asarray(w, dtype=float))


@dataclass
class CurvatureTensor:
    """R^i_{jkl} plus the lowered form R_{ijkl} = g_im R^m_{jkl}."""

    up: np.ndarray
    low: np.ndarray

    def apply(self, u, v, w) -> np.ndarray:
        """(R(v, w) u)^i = R^i_{jkl} u^j v^k w^l."""
        return np.einsum("ijkl,j,k,l->i", self.up, u, v, w)


@dataclass
class TangentSplit:
    """Horizontal/vertical components of a 2n phase-tangent vector."""

    horizontal: np.ndarray
    vertical: np.ndarray


def christoffel(g: MetricField, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    gx = g(x)
    dg = g.dg(x)
    ginv = np.linalg.inv(gx)
    # term[l, j, k] = d_j g_lk + d_k g_lj - d_l g_jk
    term = (np.einsum("lkj->ljk", dg) + dg
            - np.einsum("jkl->ljk", dg))
    return 0.5 * np.einsum("il,ljk->ijk", ginv, term)


def dchristoffel(g: MetricField, x) -> np.ndarray:
    """dGamma[i, j, k, m] = d Gamma^i_{jk} / d x^m."""
    x = np.asarray(x, dtype=float)
    gx = g(x)
    dg = g.dg(x)
    d2g = g.d2g(x)
    ginv = np.linalg.inv(gx)
    term = (np.einsum("lkj->ljk", dg) + dg
            - np.einsum("jkl->ljk", dg))
    # d_m term[l, j, k]
    dterm = (np.einsum("lkjm->ljkm", d2g) + d2g
             - np.einsum("jklm->ljkm", d2g))
    dginv = -np.einsum("ia,abm,bl->ilm", ginv, dg, ginv)
    return 0.5 * (np.einsum("ilm,ljk->ijkm", dginv, term)
                  + np.einsum("il,ljkm->ijkm", ginv, dterm))


def riemann(g: MetricField, x) -> CurvatureTensor:
    x = np.asarray(x, dtype=float)
    Gamma = christoffel(g, x)
    dGamma = dchristoffel(g, x)
    # R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
    #           + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}
    up = (np.einsum("iljk->ijkl", dGamma)
          - np.einsum("ikjl->ijkl", dGamma)
          + np.einsum("ikm,mlj->ijkl", Gamma, Gamma)
          - np.einsum("ilm,mkj->ijkl", Gamma, Gamma))
    low = np.einsum("im,mjkl->ijkl", g(x), up)
    return CurvatureTensor(up=up, low=low)


def sectional(g: MetricField, x, v, w) -> float:
    """Sectional curvature of span{v, w} at x."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    gx = g(x)
    # normalize first so the degeneracy threshold is scale-aware
    nv, nw = np.sqrt(v @ gx @ v), np.sqrt(w @ gx @ w)
    if nv < 1e-300 or nw < 1e-300:
        raise DegeneratePlane("zero vector spans no plane")
    v, w = v / nv, w / nw
    gram = (v @ gx @ v) * (w @ gx @ w) - (v @ gx @ w) ** 2
    if gram < 1e-12:
        raise DegeneratePlane("vectors are numerically parallel")
    R = riemann(g, x)
    num = np.einsum("ijkl,i,j,k,l->", R.low, v, w, v, w)
    return float(num / gram)


def project(g: MetricField, x, v, w):
    """Split w into its component along v and its g-orthogonal complement."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    gx = g(x)
    vv = v @ gx @ v
    if vv <= 0 or not np.isfinite(vv):
        raise ZeroVector("projection direction must be nonzero")
    tang = (v @ gx @ w) / vv * v
    return tang, w - tang


def connector_split(g: MetricField, x, v, xi) -> TangentSplit:
    """Split a 2n-vector xi = (dx, dv) into (d pi (xi), K(xi))."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    xi = np.asarray(xi, dtype=float)
    n = x.size
    Gamma = christoffel(g, x)
    hor = xi[:n]
    vert = xi[n:] + np.einsum("ijk,j,k->i", Gamma, hor, v)
    return TangentSplit(horizontal=hor, vertical=vert)


def connector_reconstruct(g: MetricField, x, v, split: TangentSplit) -> np.ndarray:
    Gamma = christoffel(g, np.asarray(x, dtype=float))
    hor = split.horizontal
    dv = split.vertical - np.einsum("ijk,j,k->i", Gamma, hor, np.asarray(v, dtype=float))
    return np.concatenate([hor, dv])


def gram_schmidt(gx: np.ndarray, vectors) -> np.ndarray:
    """g-orthonormalize rows of `vectors`, skipping near-dependent ones."""
    out = []
    for v in vectors:
        v = np.asarray(v, dtype=float).copy()
        for u in out:
            v -= (u @ gx @ v) * u
        nrm = np.sqrt(max(v @ gx @ v, 0.0))
        if nrm > _GS_SKIP:
            out.append(v / nrm)
    return np.array(out)


def orthonormal_completion(g: MetricField, x, v) -> np.ndarray:
    """Deterministic g-orthonormal frame (v/|v|, v_2, ..., v_n).

    Rows are the frame vectors.  Completion seeds are the standard basis
    vectors in order, with near-parallel seeds skipped.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    gx = g(x)
    nv = np.sqrt(max(v @ gx @ v, 0.0))
    if nv < 1e-300:
        raise ZeroVector("cannot complete the zero vector to a frame")
    n = x.size
    seeds = [v] + [np.eye(n)[i] for i in range(n)]
    frame = gram_schmidt(gx, seeds)
    if frame.shape[0] != n:
        raise ZeroVector("Gram-Schmidt failed to produce a full frame")
    return frame
