"""Integration of the magnetic / semi-spray ODE on a chart.

The chart form of the equation of motion is
    xdot^i = v^i
    vdot^i = -Gamma^i_{jk}(x) v^j v^k + X_V^i(x, v)
with X_V = Y(x) v for a magnetic system.  The default integrator is
fixed-step RK4; adaptive RK45 is delegated to scipy.  Speed drift along the
orbit is recorded, never silently corrected (unless renormalization is
explicitly enabled), so it can serve as an error indicator.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (DomainExit, DomainViolation, NonpositiveSpeed,
                     StepLimitExceeded)
from .geometry import christoffel, dchristoffel
from .system import MagneticSystem

__all__ = [
    "PhaseState",
    "IntegratorConfig",
    "Trajectory",
    "generator",
    "generator_jacobian",
    "integrate",
    "dynamical_exp",
    "oddness_residual",
    "variational_flow",
]


@dataclass(frozen=True)
class PhaseState:
    """A point-with-velocity pair (x, v) with its nominal speed."""

    x: np.ndarray
    v: np.ndarray
    s: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.s <= 0:
            raise NonpositiveSpeed(f"nominal speed must be positive, got {self.s}")

    @staticmethod
    def at_speed(sys: MagneticSystem, x, v, s: float) -> "PhaseState":
        """Rescale the direction v to g-norm s."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        nrm = sys.metric.norm(x, v)
        if nrm == 0:
            raise NonpositiveSpeed("zero direction has no speed")
        return PhaseState(x=x, v=(s / nrm) * v, s=s)

    def reversed(self) -> "PhaseState":
        return PhaseState(x=self.x, v=-self.v, s=self.s)


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"          # "rk4" | "rk45"
    step: float = 1e-3           # fixed step (rk4)
    rtol: float = 1e-10          # adaptive tolerances (rk45)
    atol: float = 1e-12
    renormalize_speed: bool = False
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.step <= 0 or self.rtol <= 0 or self.atol <= 0:
            raise ValueError("step sizes and tolerances must be positive")
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class Trajectory:
    times: np.ndarray                 # (N,)
    states: np.ndarray                # (N, 2n)
    nominal_speed: float
    speed_drift: float                # max relative g-norm deviation
    exited: bool = False              # orbit left the chart guard
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.states.shape[1] // 2

    def state(self, i: int) -> PhaseState:
        n = self.n
        return PhaseState(x=self.states[i, :n], v=self.states[i, n:],
                          s=self.nominal_speed)

    @property
    def final(self) -> PhaseState:
        return self.state(len(self.times) - 1)

    def to_csv(self) -> str:
        """Header `t, x1..xn, v1..vn, speed_drift`; one row per node."""
        n = self.n
        cols = (["t"] + [f"x{i+1}" for i in range(n)]
                + [f"v{i+1}" for i in range(n)] + ["speed_drift"])
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        drifts = self.meta.get("drift_per_node")
        for i, t in enumerate(self.times):
            d = drifts[i] if drifts is not None else self.speed_drift
            row = [repr(float(t))] + [repr(float(u)) for u in self.states[i]]
            row.append(repr(float(d)))
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def generator(sys: MagneticSystem, x, v) -> np.ndarray:
    """The 2n generator (xdot, vdot) of the flow at (x, v)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    Gamma = christoffel(sys.metric, x)
    acc = -np.einsum("ijk,j,k->i", Gamma, v, v) + sys.x_vertical(x, v)
    return np.concatenate([v, acc])


def generator_jacobian(sys: MagneticSystem, x, v) -> np.ndarray:
    """2n x 2n Jacobian of the generator; analytic for magnetic systems
    with derivative closures, finite differences for custom vertical fields.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    n = x.size
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    Gamma = christoffel(sys.metric, x)
    dGamma = dchristoffel(sys.metric, x)
    J[n:, :n] = -np.einsum("ijkm,j,k->im", dGamma, v, v)
    J[n:, n:] = -2.0 * np.einsum("ijk,k->ij", Gamma, v)
    if sys.is_magnetic:
        Y = sys.lorentz(x)
        J[n:, :n] += np.einsum("ijk,j->ik", sys.dlorentz(x), v)
        J[n:, n:] += Y
    else:
        h = 1e-6
        for k in range(n):
            e = np.zeros(n)
            e[k] = h
            J[n:, k] += (sys.x_vertical(x + e, v) - sys.x_vertical(x - e, v)) / (2 * h)
            J[n:, n + k] += (sys.x_vertical(x, v + e) - sys.x_vertical(x, v - e)) / (2 * h)
    return J


def _rhs(sys, y, n):
    return generator(sys, y[:n], y[n:])


def _rk4_path(sys, y0, T, h, chart, renorm, metric, s, max_steps,
              rhs=None, observe=None):
    """Shared fixed-step RK4 driver.  `rhs(y) -> ydot` defaults to the plain
    generator; `observe(t, y)` is called at every accepted node."""
    n = len(y0) // 2 if rhs is None else None
    f = (lambda y: _rhs(sys, y, n)) if rhs is None else rhs
    nsteps = max(1, int(round(T / h)))
    if nsteps > max_steps:
        raise StepLimitExceeded(f"{nsteps} steps exceed the budget {max_steps}")
    hh = T / nsteps
    t, y = 0.0, np.array(y0, dtype=float)
    times = [0.0]
    path = [y.copy()]
    exited = False
    for _ in range(nsteps):
        try:
            k1 = f(y)
            k2 = f(y + 0.5 * hh * k1)
            k3 = f(y + 0.5 * hh * k2)
            k4 = f(y + hh * k3)
        except DomainViolation:
            # a stage point crossed the chart guard: report a clean exit
            exited = True
            break
        ynew = y + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        xs = ynew[:chart.dim]
        if not chart.contains(xs):
            exited = True
            break
        if renorm:
            nrm = metric.norm(xs, ynew[chart.dim:2 * chart.dim])
            if nrm > 0:
                ynew[chart.dim:2 * chart.dim] *= s / nrm
        y = ynew
        t += hh
        times.append(t)
        path.append(y.copy())
        if observe is not None:
            observe(t, y)
    return np.array(times), np.array(path), exited


def integrate(sys: MagneticSystem, state: PhaseState, T: float,
              cfg: Optional[IntegratorConfig] = None) -> Trajectory:
    """Integrate the flow for time T.  On chart exit a partial trajectory is
    returned with `exited=True` rather than raising, since orbit escape is
    informative for open-chart models."""
    cfg = cfg or IntegratorConfig()
    if not np.isfinite(T):
        raise ValueError("T must be finite")
    n = sys.dim
    sys.chart.require(state.x)
    y0 = np.concatenate([state.x, state.v])
    if cfg.method == "rk4":
        times, path, exited = _rk4_path(
            sys, y0, T, cfg.step, sys.chart, cfg.renormalize_speed,
            sys.metric, state.s, cfg.max_steps)
    else:
        sol = solve_ivp(lambda t, y: _rhs(sys, y, n), (0.0, T), y0,
                        method="RK45", rtol=cfg.rtol, atol=cfg.atol,
                        dense_output=False)
        times, path = sol.t, sol.y.T
        exited = False
        inside = [sys.chart.contains(row[:n]) for row in path]
        if not all(inside):
            cut = inside.index(False)
            times, path, exited = times[:cut], path[:cut], True
            if cut == 0:
                raise DomainExit("orbit left the chart immediately")
    drifts = np.array([abs(sys.metric.norm(row[:n], row[n:]) - state.s) / state.s
                       for row in path])
    return Trajectory(times=times, states=path, nominal_speed=state.s,
                      speed_drift=float(drifts.max()), exited=exited,
                      meta={"drift_per_node": drifts,
                            "method": cfg.method, "step": cfg.step})


def dynamical_exp(sys: MagneticSystem, x, u,
                  cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
    """exp_x(u): footpoint of the time-|u| flow of (x, u/|u|); x for u = 0."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    sys.chart.require(x)
    t = sys.metric.norm(x, u)
    if t == 0.0:
        return x.copy()
    traj = integrate(sys, PhaseState(x=x, v=u / t, s=1.0), t, cfg)
    if traj.exited:
        raise DomainExit("dynamical exponential left the chart", partial=traj)
    return traj.final.x


def oddness_residual(sys: MagneticSystem, x, v):
    """(|X_H(x,-v) + X_H(x,v)|_g, |X_V(x,-v) + X_V(x,v)|_g).

    Both vanish for magnetic systems; for a custom vertical field the second
    component reports the failure of oddness.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    h = v + (-v)                       # X_H(x, v) = v for semi-spray flows
    vert = sys.x_vertical(x, v) + sys.x_vertical(x, -v)
    return sys.metric.norm(x, h), sys.metric.norm(x, vert)


def _var_rhs(sys, y, n):
    """RHS of the coupled (state, variational matrix) system."""
    base = y[:2 * n]
    J = y[2 * n:].reshape(2 * n, 2 * n)
    dbase = _rhs(sys, base, n)
    Df = generator_jacobian(sys, base[:n], base[n:])
    return np.concatenate([dbase, (Df @ J).ravel()])


def variational_flow(sys: MagneticSystem, state: PhaseState, T: float,
                     cfg: Optional[IntegratorConfig] = None,
                     J0: Optional[np.ndarray] = None,
                     return_final_state: bool = False):
    """Solve Jdot = Df J along the orbit, J(0) = identity (or J0)."""
    cfg = cfg or IntegratorConfig()
    n = sys.dim
    sys.chart.require(state.x)
    J0 = np.eye(2 * n) if J0 is None else np.asarray(J0, dtype=float)
    y0 = np.concatenate([state.x, state.v, J0.ravel()])
    times, path, exited = _rk4_path(
        sys, y0, T, cfg.step, sys.chart, False, sys.metric, state.s,
        cfg.max_steps, rhs=lambda y: _var_rhs(sys, y, n))
    if exited:
        raise DomainExit("variational orbit left the chart")
    yend = path[-1]
    J = yend[2 * n:].reshape(2 * n, 2 * n)
    if return_final_state:
        return J, PhaseState(x=yend[:n], v=yend[n:2 * n], s=state.s)
    return J
