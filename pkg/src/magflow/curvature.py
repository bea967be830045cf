"""Magnetic curvature: the endomorphisms A, R_s, M_s of the hyperplane
bundle v-perp, the s-magnetic sectional curvature, and a sampling-based
negativity report for the Anosov criterion.

For a g-unit v the operators act on w in v-perp:
    A(w)   = -(3/4) Y P_v(Y w) - (1/4) P_perp(Y^2 w)
    R_s(w) = s^2 R(w, v) v - s (nabla_w Y) v + (s/2) P_perp((nabla_v Y) w)
    M_s    = R_s + A
and Sec_s(v, w) = g(M_s(w), w) on orthonormal pairs (v, w).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import NonOrthonormalFrame, NonpositiveSpeed, NonUnitVector
from .geometry import gram_schmidt, orthonormal_completion, project, riemann
from .system import MagneticSystem

__all__ = [
    "PerpEndomorphism",
    "op_A",
    "op_R",
    "magnetic_operator",
    "magnetic_sectional",
    "orthonormalize_pair",
    "AnosovReport",
    "anosov_report",
]

_UNIT_TOL = 1e-8


@dataclass
class PerpEndomorphism:
    """An endomorphism of v-perp, stored as its matrix in the deterministic
    orthonormal completion frame of v (frame rows e_2 ... e_n)."""

    x: np.ndarray
    v: np.ndarray
    frame: np.ndarray          # (n-1, n) rows spanning v-perp
    matrix: np.ndarray         # (n-1, n-1)
    apply_fn: object = None

    def apply(self, w) -> np.ndarray:
        """Action on an ambient vector w in v-perp."""
        return np.asarray(self.apply_fn(np.asarray(w, dtype=float)))


def _check_unit(sys, x, v):
    nrm = sys.metric.norm(x, v)
    if abs(nrm - 1.0) > _UNIT_TOL:
        raise NonUnitVector(f"expected a g-unit vector, |v|_g = {nrm}")


def _as_perp_endo(sys, x, v, action) -> PerpEndomorphism:
    frame = orthonormal_completion(sys.metric, x, v)[1:]
    g = sys.metric(x)
    mat = np.empty((frame.shape[0], frame.shape[0]))
    for b, eb in enumerate(frame):
        out = action(eb)
        for a, ea in enumerate(frame):
            mat[a, b] = ea @ g @ out
    return PerpEndomorphism(x=np.asarray(x, dtype=float),
                            v=np.asarray(v, dtype=float),
                            frame=frame, matrix=mat, apply_fn=action)


def op_A(sys: MagneticSystem, x, v) -> PerpEndomorphism:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_unit(sys, x, v)
    Y = sys.lorentz(x)

    def action(w):
        Yw = Y @ w
        pv_Yw, _ = project(sys.metric, x, v, Yw)
        _, perp_Y2w = project(sys.metric, x, v, Y @ Yw)
        return -0.75 * (Y @ pv_Yw) - 0.25 * perp_Y2w

    return _as_perp_endo(sys, x, v, action)


def op_R(sys: MagneticSystem, s: float, x, v) -> PerpEndomorphism:
    if s <= 0:
        raise NonpositiveSpeed(f"speed must be positive, got {s}")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_unit(sys, x, v)
    R = riemann(sys.metric, x)
    nabla_v_Y = sys.nabla_lorentz(x, v)

    def action(w):
        jac = R.apply(v, w, v)                      # R(w, v) v
        nabla_w_Y = sys.nabla_lorentz(x, w)
        _, perp = project(sys.metric, x, v, nabla_v_Y @ w)
        return s**2 * jac - s * (nabla_w_Y @ v) + 0.5 * s * perp

    return _as_perp_endo(sys, x, v, action)


def magnetic_operator(sys: MagneticSystem, s: float, x, v) -> PerpEndomorphism:
    a = op_A(sys, x, v)
    r = op_R(sys, s, x, v)

    def action(w):
        return a.apply(w) + r.apply(w)

    endo = _as_perp_endo(sys, x, v, action)
    return endo


def magnetic_sectional(sys: MagneticSystem, s: float, x, v, w) -> float:
    """g(M_s(w), w) for a g-orthonormal ordered pair (v, w)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    g = sys.metric(x)
    if (abs(v @ g @ v - 1.0) > 1e-10 or abs(w @ g @ w - 1.0) > 1e-10
            or abs(v @ g @ w) > 1e-10):
        raise NonOrthonormalFrame("(v, w) must be g-orthonormal")
    M = magnetic_operator(sys, s, x, v)
    return float(w @ g @ M.apply(w))


def orthonormalize_pair(sys: MagneticSystem, x, v, w):
    """Helper wrapping Gram-Schmidt so callers can build a valid frame."""
    frame = gram_schmidt(sys.metric(x), [v, w])
    if frame.shape[0] < 2:
        raise NonOrthonormalFrame("vectors do not span a plane")
    return frame[0], frame[1]


@dataclass
class AnosovReport:
    min: float
    max: float
    mean: float
    samples: int
    speed: float
    verdict: str

    def to_json(self) -> str:
        return json.dumps({
            "min": self.min, "max": self.max, "mean": self.mean,
            "samples": self.samples, "speed": self.speed,
            "verdict": self.verdict,
        }, indent=2, sort_keys=True)


def anosov_report(sys: MagneticSystem, s: float, sample_count: int,
                  seed: int = 0) -> AnosovReport:
    """Sample s-magnetic sectional curvatures over random orthonormal frames.

    A negative maximum certifies the negativity hypothesis of the Anosov
    criterion **on the sample only**; this is a sampling certificate, not a
    proof.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    rng = np.random.default_rng(seed)
    vals = np.empty(sample_count)
    n = sys.dim
    for i in range(sample_count):
        x = sys.chart.sample_point(rng)
        while True:
            raw = rng.standard_normal((2, n))
            frame = gram_schmidt(sys.metric(x), raw)
            if frame.shape[0] >= 2:
                break
        vals[i] = magnetic_sectional(sys, s, x, frame[0], frame[1])
    mx = float(vals.max())
    verdict = ("criterion satisfied on sample" if mx < 0
               else "criterion not satisfied on sample")
    return AnosovReport(min=float(vals.min()), max=mx, mean=float(vals.mean()),
                        samples=sample_count, speed=s, verdict=verdict)
