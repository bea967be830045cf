"""Parametrized submanifolds, classical and dynamical second fundamental
forms, invariance defects, exponential-image candidate hypersurfaces, the
augmented exponential map, the quadrature defect functional, and the
k-plane (Cartan-type) probe.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from .errors import (
    BadDimension,
    DegenerateImage,
    DomainExit,
    DomainViolation,
    NotTangent,
    NonUnitVector,
    ProjectionFailure,
    RankDeficient,
)
from .flow import IntegratorConfig, PhaseState, dynamical_exp, integrate, variational_flow
from .geometry import MetricField, christoffel, gram_schmidt, sectional
from .system import MagneticSystem

__all__ = [
    "ParamSubmanifold",
    "HyperplaneElement",
    "DynIIValue",
    "DefectReport",
    "classical_II",
    "dynamical_II",
    "invariance_defect",
    "dynamic_consistency_check",
    "candidate_submanifold",
    "candidate_hypersurface",
    "augmented_exp",
    "alpha_defect",
    "cartan_probe",
    "CartanReport",
    "make_submanifold",
]

_RANK_TOL = 1e-8
_TANGENT_TOL = 1e-8


class ParamSubmanifold:
    """An immersion f: parameter domain (dim k) -> chart coordinates (dim n).

    Derivatives come from closures when provided, otherwise from central
    finite differences of f (Jacobian) and of the Jacobian (Hessian).
    Evaluations are cached per parameter point; evaluators are immutable.
    """

    def __init__(self, k: int, f: Callable, jac: Optional[Callable] = None,
                 hess: Optional[Callable] = None,
                 guard: Optional[Callable] = None,
                 sample_bounds=None, fd_step: float = 1e-4,
                 name: str = "submanifold"):
        self.k = k
        self._f = f
        self._jac = jac
        self._hess = hess
        self.guard = guard
        self.sample_bounds = sample_bounds
        self.fd_step = fd_step
        self.name = name
        self._cache_jac: dict = {}
        self._cache_hess: dict = {}

    def point(self, p) -> np.ndarray:
        return np.asarray(self._f(np.asarray(p, dtype=float)), dtype=float)

    def jacobian(self, p) -> np.ndarray:
        """J[i, a] = d f^i / d p^a, shape (n, k)."""
        p = np.asarray(p, dtype=float)
        key = p.tobytes()
        if key in self._cache_jac:
            return self._cache_jac[key]
        if self._jac is not None:
            J = np.asarray(self._jac(p), dtype=float)
        else:
            h = self.fd_step
            cols = []
            for a in range(self.k):
                e = np.zeros(self.k)
                e[a] = h
                cols.append((self.point(p + e) - self.point(p - e)) / (2 * h))
            J = np.array(cols).T
        self._cache_jac[key] = J
        return J

    def hessian(self, p) -> np.ndarray:
        """H[i, a, b] = d^2 f^i / d p^a d p^b, shape (n, k, k)."""
        p = np.asarray(p, dtype=float)
        key = p.tobytes()
        if key in self._cache_hess:
            return self._cache_hess[key]
        if self._hess is not None:
            H = np.asarray(self._hess(p), dtype=float)
        else:
            h = self.fd_step
            k = self.k
            cols = []
            for b in range(k):
                e = np.zeros(k)
                e[b] = h
                cols.append((self.jacobian(p + e) - self.jacobian(p - e)) / (2 * h))
            H = np.stack(cols, axis=2)               # (n, k, k)
            H = 0.5 * (H + H.transpose(0, 2, 1))
        self._cache_hess[key] = H
        return H

    def sample_param(self, rng: np.random.Generator) -> np.ndarray:
        lo, hi = (self.sample_bounds if self.sample_bounds is not None
                  else (-0.5 * np.ones(self.k), 0.5 * np.ones(self.k)))
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        for _ in range(1000):
            p = rng.uniform(lo, hi)
            if self.guard is None or self.guard(p):
                return p
        raise ProjectionFailure("could not sample a parameter inside the guard")


@dataclass
class HyperplaneElement:
    """An oriented hyperplane at x, given by its g-unit normal."""

    x: np.ndarray
    normal: np.ndarray
    basis: Optional[np.ndarray] = None    # (n, n-1) spanning columns


@dataclass
class DynIIValue:
    """The two normal-valued components of the dynamical second fundamental
    form: (II([X_H]^T, v) - [X_V]^perp, [X_H]^perp)."""

    first: np.ndarray
    second: np.ndarray

    def norm_sq(self, gx: np.ndarray) -> float:
        return float(self.first @ gx @ self.first
                     + self.second @ gx @ self.second)


@dataclass
class DefectReport:
    sup: float
    mean: float
    samples: int
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"sup": self.sup, "mean": self.mean,
                           "samples": self.samples, "meta": self.meta},
                          indent=2, sort_keys=True, default=str)


def _tangent_frame(gx: np.ndarray, J: np.ndarray) -> np.ndarray:
    """g-orthonormal rows spanning the column space of J; checks rank."""
    sv = np.linalg.svd(J, compute_uv=False)
    if sv.min() < _RANK_TOL:
        raise RankDeficient(
            f"parametrization Jacobian rank-deficient (sigma_min = {sv.min():.3e})")
    return gram_schmidt(gx, J.T)


def _normal_part(gx: np.ndarray, frame: np.ndarray, w: np.ndarray) -> np.ndarray:
    out = np.asarray(w, dtype=float).copy()
    for e in frame:
        out -= (e @ gx @ out) * e
    return out


def classical_II(g: MetricField, N: ParamSubmanifold, p, u, w) -> np.ndarray:
    """Second fundamental form II(u, w) at f(p), as an ambient normal vector."""
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    x = N.point(p)
    J = N.jacobian(p)
    gx = g(x)
    frame = _tangent_frame(gx, J)
    a, *_ = np.linalg.lstsq(J, u, rcond=None)
    b, *_ = np.linalg.lstsq(J, w, rcond=None)
    H = N.hessian(p)
    Gamma = christoffel(g, x)
    second = np.einsum("iab,a,b->i", H, a, b) + np.einsum("ijk,j,k->i", Gamma, u, w)
    return _normal_part(gx, frame, second)


def dynamical_II(sys: MagneticSystem, N: ParamSubmanifold, p, v) -> DynIIValue:
    """Dynamical second fundamental form of N at (f(p), v), v a g-unit vector
    tangent to N.  For semi-spray flows the second component vanishes."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    x = N.point(p)
    gx = sys.metric(x)
    if abs(v @ gx @ v - 1.0) > 1e-8:
        raise NonUnitVector("direction must be g-unit")
    J = N.jacobian(p)
    frame = _tangent_frame(gx, J)
    perp_v = _normal_part(gx, frame, v)
    if np.sqrt(max(perp_v @ gx @ perp_v, 0)) > _TANGENT_TOL:
        raise NotTangent("direction is not tangent to the submanifold")
    # X_H = v for semi-spray flows, so [X_H]^top = v and [X_H]^perp = 0
    xh_perp = perp_v
    xv_perp = _normal_part(gx, frame, sys.x_vertical(x, v))
    first = classical_II(sys.metric, N, p, v, v) - xv_perp
    return DynIIValue(first=first, second=xh_perp)


def invariance_defect(sys: MagneticSystem, N: ParamSubmanifold,
                      sample_count: int, seed: int = 0) -> DefectReport:
    """Sup and mean of ||II^phi||^2 over sampled (point, unit tangent) pairs.

    Zero (to tolerance) exactly when N is totally invariant on the sample.
    """
    rng = np.random.default_rng(seed)
    vals = np.empty(sample_count)
    for i in range(sample_count):
        p = N.sample_param(rng)
        x = N.point(p)
        gx = sys.metric(x)
        J = N.jacobian(p)
        c = rng.standard_normal(N.k)
        v = J @ c
        v = v / np.sqrt(v @ gx @ v)
        vals[i] = dynamical_II(sys, N, p, v).norm_sq(gx)
    return DefectReport(sup=float(vals.max()), mean=float(vals.mean()),
                        samples=sample_count,
                        meta={"seed": seed, "submanifold": N.name})


def _project_to_submanifold(N: ParamSubmanifold, y, q0, max_iter: int = 50):
    """Damped Gauss-Newton projection of the chart point y onto N."""
    q = np.asarray(q0, dtype=float).copy()
    r = N.point(q) - y
    cost = r @ r
    for _ in range(max_iter):
        J = N.jacobian(q)
        step, *_ = np.linalg.lstsq(J, r, rcond=None)
        if np.linalg.norm(step) < 1e-14:
            return q, np.sqrt(cost)
        lam = 1.0
        for _ in range(20):
            qn = q - lam * step
            rn = N.point(qn) - y
            cn = rn @ rn
            if cn <= cost:
                q, r, cost = qn, rn, cn
                break
            lam *= 0.5
        else:
            return q, np.sqrt(cost)
        if np.linalg.norm(lam * step) < 1e-12:
            return q, np.sqrt(cost)
    raise ProjectionFailure("Gauss-Newton projection did not converge")


def dynamic_consistency_check(sys: MagneticSystem, N: ParamSubmanifold, p, v,
                              T: float, cfg: Optional[IntegratorConfig] = None,
                              nodes: int = 50) -> float:
    """Integrate the flow from tangent data and return the max distance of
    the sampled orbit to N (chart-coordinate distance via projection)."""
    if not (0 < N.k < sys.dim):
        raise BadDimension("submanifold dimension must satisfy 0 < k < n")
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    x = N.point(p)
    gx = sys.metric(x)
    if abs(v @ gx @ v - 1.0) > 1e-8:
        raise NonUnitVector("direction must be g-unit")
    traj = integrate(sys, PhaseState(x=x, v=v, s=1.0), T, cfg)
    idx = np.unique(np.linspace(0, len(traj.times) - 1, nodes).astype(int))
    worst = 0.0
    q = p.copy()
    for i in idx:
        q, dist = _project_to_submanifold(N, traj.states[i, :sys.dim], q)
        worst = max(worst, dist)
    return worst


def candidate_submanifold(sys: MagneticSystem, x, basis, radius: float,
                          cfg: Optional[IntegratorConfig] = None,
                          fd_step: float = 1e-4,
                          name: str = "exp-image") -> ParamSubmanifold:
    """The k-dimensional exp-image of a tangent k-plane at x.

    Parametrized by u in the plane, |u| <= radius, u -> exp_x(B u).  The
    Jacobian is computed from the variational flow (not finite differences
    of the exponential); the base point uses the exact tangent plane.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    x = np.asarray(x, dtype=float)
    B = np.asarray(basis, dtype=float)      # (n, k) g-orthonormal columns
    gx = sys.metric(x)
    frame = gram_schmidt(gx, B.T)
    if frame.shape[0] != B.shape[1]:
        raise DegenerateImage("plane basis is rank-deficient")
    B = frame.T
    k = B.shape[1]
    cfg = cfg or IntegratorConfig(step=1e-2)

    def f(u):
        return dynamical_exp(sys, x, B @ u, cfg)

    def jac(u):
        u = np.asarray(u, dtype=float)
        w = B @ u
        t = float(np.sqrt(w @ gx @ w))
        if t < 1e-12:
            return B.copy()
        uhat = w / t
        J2n, end = variational_flow(sys, PhaseState(x=x, v=uhat, s=1.0), t,
                                    cfg, return_final_state=True)
        n = sys.dim
        J_xv = J2n[:n, n:]
        v_end = end.v          # horizontal generator component at the endpoint
        g_uhat_B = (gx @ uhat) @ B                  # row of d|u| per parameter
        Duhat = (B - np.outer(uhat, g_uhat_B)) / t
        return J_xv @ Duhat + np.outer(v_end, g_uhat_B)

    bound = radius / np.sqrt(k)
    return ParamSubmanifold(
        k=k, f=f, jac=jac, guard=lambda u: float(u @ u) <= radius**2,
        sample_bounds=(-bound * np.ones(k) * 0.9, bound * np.ones(k) * 0.9),
        fd_step=fd_step, name=name)


def candidate_hypersurface(sys: MagneticSystem, x, plane, radius: float,
                           grid: int = 0,
                           cfg: Optional[IntegratorConfig] = None) -> ParamSubmanifold:
    """Hyperplane case of `candidate_submanifold` (k = n - 1).

    `plane` is either a HyperplaneElement or an (n, n-1) basis array."""
    if isinstance(plane, HyperplaneElement):
        basis = _plane_basis(sys, plane)
    else:
        basis = np.asarray(plane, dtype=float)
    if basis.shape != (sys.dim, sys.dim - 1):
        raise BadDimension("hyperplane basis must have shape (n, n-1)")
    return candidate_submanifold(sys, x, basis, radius, cfg,
                                 name="candidate-hypersurface")


def _plane_basis(sys: MagneticSystem, elem: HyperplaneElement) -> np.ndarray:
    if elem.basis is not None:
        return np.asarray(elem.basis, dtype=float)
    from .geometry import orthonormal_completion
    frame = orthonormal_completion(sys.metric, elem.x, elem.normal)
    return frame[1:].T


def augmented_exp(sys: MagneticSystem, x, basis, v, t: float,
                  cfg: Optional[IntegratorConfig] = None):
    """E(x, Pi, v, t) = (exp_x(t v), d_{tv} exp_x(Pi)).

    Returns (endpoint coordinates, HyperplaneElement of the pushed plane)."""
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    B = np.asarray(basis, dtype=float)
    v = np.asarray(v, dtype=float)
    gx = sys.metric(x)
    if abs(v @ gx @ v - 1.0) > 1e-8:
        raise NonUnitVector("v must be g-unit")
    c, res, *_ = np.linalg.lstsq(B, v, rcond=None)
    if np.linalg.norm(B @ c - v) > 1e-8:
        raise NotTangent("v must lie in the plane")
    N = candidate_submanifold(sys, x, B, radius=t * 1.5, cfg=cfg)
    # candidate_submanifold re-orthonormalizes the basis; recompute coords
    Bo = N.jacobian(np.zeros(B.shape[1]))
    c, *_ = np.linalg.lstsq(Bo, v, rcond=None)
    y = N.point(t * c)
    P = N.jacobian(t * c)
    sv = np.linalg.svd(P, compute_uv=False)
    if sv.min() < 1e-10:
        raise DegenerateImage("pushed basis is rank-deficient")
    gy = sys.metric(y)
    pushed = gram_schmidt(gy, P.T)
    if pushed.shape[0] != P.shape[1]:
        raise DegenerateImage("pushed basis is rank-deficient")
    full = gram_schmidt(gy, np.vstack([pushed, np.eye(sys.dim)]))
    normal = full[-1]
    return y, HyperplaneElement(x=y, normal=normal, basis=pushed.T)


def _unit_sphere_nodes(k: int, count: int) -> np.ndarray:
    """Deterministic quadrature directions on S^{k-1} (coefficient space)."""
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        ang = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    sob = qmc.Sobol(d=k, scramble=True, seed=12345)
    raw = sob.random(count)
    from scipy.stats import norm
    pts = norm.ppf(np.clip(raw, 1e-12, 1 - 1e-12))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _alpha_at(sys: MagneticSystem, N: ParamSubmanifold, p,
              quad_count: int) -> tuple:
    """Quadrature sup/mean of ||II^phi||^2 over unit tangents of N at f(p).

    The measure is the round measure in the g-orthonormal tangent frame; the
    reported mean is the normalized average over the fiber sphere."""
    p = np.asarray(p, dtype=float)
    x = N.point(p)
    gx = sys.metric(x)
    J = N.jacobian(p)
    frame = _tangent_frame(gx, J)                   # (k, n) g-orthonormal
    nodes = _unit_sphere_nodes(frame.shape[0], quad_count)
    vals = np.empty(len(nodes))
    for i, c in enumerate(nodes):
        v = frame.T @ c
        vals[i] = dynamical_II(sys, N, p, v).norm_sq(gx)
    return float(vals.max()), float(vals.mean())


def alpha_defect(sys: MagneticSystem, x, basis, radius: float = 0.5,
                 radii=None, directions: int = 2, quad_count: int = 64,
                 cfg: Optional[IntegratorConfig] = None) -> DefectReport:
    """Quadrature defect of the exp-image hypersurface S_Pi.

    Evaluates the fiber average of ||II^phi||^2 at x, and its pullback along
    the augmented exponential at sampled (direction, t) pairs.  Zero (to
    tolerance) exactly when S_Pi is totally invariant on the sample."""
    x = np.asarray(x, dtype=float)
    B = np.asarray(basis, dtype=float)
    cfg = cfg or IntegratorConfig(step=1e-2)
    N = candidate_submanifold(sys, x, B, radius, cfg)
    k = N.k
    sup0, mean0 = _alpha_at(sys, N, np.zeros(k), quad_count)
    sups, means = [sup0], [mean0]
    if radii is None:
        radii = [0.1, 0.5 * radius, radius]         # cutoff choice: t in [0.1, radius]
    dirs = _unit_sphere_nodes(k, max(directions, 1))[:directions]
    Bo = N.jacobian(np.zeros(k))
    for c in dirs:
        v = Bo @ c
        for t in radii:
            try:
                y, elem = augmented_exp(sys, x, Bo, v, float(t), cfg)
            except DegenerateImage:
                sups.append(np.inf)
                means.append(np.inf)
                continue
            N2 = candidate_submanifold(sys, y, np.asarray(elem.basis), radius, cfg)
            s2, m2 = _alpha_at(sys, N2, np.zeros(k), quad_count)
            sups.append(s2)
            means.append(m2)
    return DefectReport(sup=float(np.max(sups)), mean=float(np.mean(means)),
                        samples=len(sups),
                        meta={"radius": radius, "radii": list(map(float, radii)),
                              "directions": int(directions),
                              "quad_count": quad_count})


@dataclass
class CartanReport:
    k: int
    planes: int
    defects: list
    fraction_invariant: float
    sec_variance: float
    sigma_norm_max: float
    verdict: str
    tol: float

    def to_json(self) -> str:
        d = {"k": self.k, "planes": self.planes,
             "fraction_invariant": self.fraction_invariant,
             "sec_variance": self.sec_variance,
             "sigma_norm_max": self.sigma_norm_max,
             "verdict": self.verdict, "tol": self.tol}
        return json.dumps(d, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("plane_id,defect,sec_variance\n")
        for i, d in enumerate(self.defects):
            buf.write(f"{i},{d!r},{self.sec_variance!r}\n")
        return buf.getvalue()


def _sigma_operator_norm(sys: MagneticSystem, x) -> float:
    """g-operator norm of the Lorentz force at x."""
    g = sys.metric(x)
    C = np.linalg.cholesky(g)
    Y = sys.lorentz(x)
    return float(np.linalg.svd(C @ Y @ np.linalg.inv(C), compute_uv=False).max())


def cartan_probe(sys: MagneticSystem, k: int, plane_samples: int,
                 seed: int = 0, radius: float = 0.4, defect_samples: int = 4,
                 tol: float = 1e-6,
                 cfg: Optional[IntegratorConfig] = None) -> CartanReport:
    """Empirical probe of the k-plane axiom: sample tangent k-planes, build
    their exp-image candidates, and measure invariance defects together with
    the sectional-curvature spread and the size of the magnetic form.

    A sample is 'consistent' with the rigidity statement when either all
    defects vanish alongside constant curvature and vanishing form, or some
    defect is genuinely nonzero (no contradiction either way)."""
    n = sys.dim
    if not (1 < k < n):
        raise BadDimension(f"need 1 < k < n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    cfg = cfg or IntegratorConfig(step=1e-2)
    defects = []
    secs = []
    sigmas = []
    for i in range(plane_samples):
        # exp-images from points near the chart guard may leave the chart;
        # those planes carry no information, so resample instead of failing
        for _ in range(50):
            x = sys.chart.sample_point(rng)
            gx = sys.metric(x)
            while True:
                frame = gram_schmidt(gx, rng.standard_normal((k, n)))
                if frame.shape[0] == k:
                    break
            try:
                N = candidate_submanifold(sys, x, frame.T, radius, cfg)
                rep = invariance_defect(sys, N, defect_samples,
                                        seed=seed + 1000 + i)
            except (DomainExit, DomainViolation):
                continue
            break
        else:
            raise DomainExit("could not find a chart-interior tangent plane")
        defects.append(rep.sup)
        secs.append(sectional(sys.metric, x, frame[0], frame[1]))
        sigmas.append(_sigma_operator_norm(sys, x))
    defects_arr = np.array(defects)
    sec_var = float(np.var(secs))
    sig_max = float(np.max(sigmas))
    frac = float(np.mean(defects_arr < tol))
    all_invariant = bool(np.all(defects_arr < tol))
    if all_invariant and sec_var < tol and sig_max < tol:
        verdict = "consistent: all planes invariant, constant curvature, zero form"
    elif not all_invariant:
        verdict = "consistent: some planes fail invariance (no contradiction)"
    else:
        verdict = "inconsistent with the k-plane rigidity statement"
    return CartanReport(k=k, planes=plane_samples, defects=defects,
                        fraction_invariant=frac, sec_variance=sec_var,
                        sigma_norm_max=sig_max, verdict=verdict, tol=tol)


# -- builtin submanifold registry (used by the CLI and tests) --------------

def make_submanifold(spec: dict, sys: MagneticSystem) -> ParamSubmanifold:
    """Build a submanifold from a declarative spec.

    Supported types: "hyperplane" {point, normal|basis, radius},
    "sphere" {center, radius}, "exp_plane" {x, basis, radius}."""
    kind = spec.get("type")
    n = sys.dim
    if kind == "hyperplane":
        point = np.asarray(spec["point"], dtype=float)
        extent = float(spec.get("extent", 1.0))
        if "basis" in spec:
            B = np.asarray(spec["basis"], dtype=float)
        else:
            normal = np.asarray(spec["normal"], dtype=float)
            from .geometry import orthonormal_completion
            B = orthonormal_completion(sys.metric, point, normal)[1:].T
        k = B.shape[1]
        return ParamSubmanifold(
            k=k, f=lambda p: point + B @ p,
            jac=lambda p: B, hess=lambda p: np.zeros((n, k, k)),
            sample_bounds=(-extent * np.ones(k), extent * np.ones(k)),
            name="hyperplane")
    if kind == "sphere":
        if n != 3:
            raise BadDimension("builtin sphere submanifold needs an ambient dim 3")
        center = np.asarray(spec.get("center", np.zeros(3)), dtype=float)
        r = float(spec["radius"])

        def f(p):
            th, ph = p
            return center + r * np.array([np.sin(th) * np.cos(ph),
                                          np.sin(th) * np.sin(ph),
                                          np.cos(th)])

        def jac(p):
            th, ph = p
            st, ct = np.sin(th), np.cos(th)
            sp, cp = np.sin(ph), np.cos(ph)
            return r * np.array([[ct * cp, -st * sp],
                                 [ct * sp, st * cp],
                                 [-st, 0.0]])

        def hess(p):
            th, ph = p
            st, ct = np.sin(th), np.cos(th)
            sp, cp = np.sin(ph), np.cos(ph)
            H = np.empty((3, 2, 2))
            H[0] = r * np.array([[-st * cp, -ct * sp], [-ct * sp, -st * cp]])
            H[1] = r * np.array([[-st * sp, ct * cp], [ct * cp, -st * sp]])
            H[2] = r * np.array([[-ct, 0.0], [0.0, 0.0]])
            return H

        return ParamSubmanifold(
            k=2, f=f, jac=jac, hess=hess,
            sample_bounds=(np.array([0.5, 0.0]),
                           np.array([np.pi - 0.5, 2 * np.pi])),
            name="sphere")
    if kind == "exp_plane":
        x = np.asarray(spec["x"], dtype=float)
        B = np.asarray(spec["basis"], dtype=float)
        return candidate_submanifold(sys, x, B, float(spec.get("radius", 0.5)))
    raise ValueError(f"unknown submanifold type {kind!r}")
