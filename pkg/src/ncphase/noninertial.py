"""Noninertial coordinate maps of the commutative space.

``transform_t1`` maps an inertial (commutative) trajectory to a uniformly
accelerated frame. ``transform_t2`` and ``transform_t3`` go the other way:
they take a trajectory of the Lie2 resp. quadratic Newton system and return
commutative-frame coordinates built from running integrals of it.

All integrals run from the first grid node, so every map reduces to
x = x' (plus the constant shift for T1) at t = t0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .dynamics import TimeGrid, Trajectory
from .poisson import ConfigurationError, _finite_vector
from .spaces import DeformationSpec, ForceMass, Kind


@dataclass(frozen=True, eq=False)
class SampledFunction:
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_nodes,):
            raise ValueError(f"expected {self.grid.n_nodes} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("sampled function has non-finite values")
        object.__setattr__(self, "values", values)


def _cumulative(values: np.ndarray, dt: float) -> np.ndarray:
    if values.shape[0] < 2:
        raise ValueError("cumulative integration needs at least 2 samples")
    return K.cumulative_simpson(np.ascontiguousarray(values, dtype=float), float(dt))


def cumulative_integral(f: SampledFunction) -> SampledFunction:
    """Running integral from the first node.

    Even nodes use composite Simpson over interval pairs. Odd nodes add the
    last interval integrated under the quadratic through the three nearest
    samples, so the error is fourth order at every node. Exactly two samples
    fall back to the trapezoid rule.
    """
    return SampledFunction(f.grid, _cumulative(f.values, f.grid.dt))


def double_cumulative_integral(f: SampledFunction) -> SampledFunction:
    return cumulative_integral(cumulative_integral(f))


@dataclass(frozen=True, eq=False)
class T1Params:
    """Uniform-acceleration frame: scale ``kappa`` (``inf`` gives a pure
    Galilei map), acceleration plane (rho, tau), boost ``v`` and shift ``y``."""

    kappa: float
    fm: ForceMass
    rho: int = 1
    tau: int = 2
    v: np.ndarray = (0.0, 0.0, 0.0)
    y: np.ndarray = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.kappa > 0:
            raise ConfigurationError(f"kappa must be positive, got {self.kappa}")
        if {self.rho, self.tau} - {1, 2, 3} or self.rho == self.tau:
            raise ConfigurationError(f"rho, tau must be distinct indices in 1..3, got {self.rho}, {self.tau}")
        object.__setattr__(self, "v", _finite_vector(self.v, "v"))
        object.__setattr__(self, "y", _finite_vector(self.y, "y"))


def transform_t1(traj: Trajectory, p: T1Params) -> Trajectory:
    """Map an inertial trajectory into the frame accelerating in the (rho, tau) plane.

    x'_rho = x_rho - F_tau t^2 / (2 kappa) + v_rho t + y_rho
    x'_tau = x_tau + F_rho t^2 / (2 kappa) + v_tau t + y_tau
    x'_i   = x_i + v_i t + y_i
    """
    if traj.spec is not None and traj.spec.kind is not Kind.COMMUTATIVE:
        raise ValueError(f"T1 acts on commutative-space trajectories, got {traj.spec.kind.value}")
    t = traj.t[:, None]
    r, s = p.rho - 1, p.tau - 1
    F = p.fm.F
    accel = np.zeros(3)
    accel[r] = -F[s] / p.kappa
    accel[s] = F[r] / p.kappa
    x = traj.x + 0.5 * accel * t**2 + p.v * t + p.y
    v = traj.v + accel * t + p.v
    return Trajectory(traj.grid, x, v, spec=traj.spec, fm=traj.fm, method=f"{traj.method}+t1")


def _a_function(xprime: np.ndarray, grid: TimeGrid, F_gamma: float, kappa_bar: float):
    # A with A'' = -(F_gamma / kappa_bar)^2 t^2 x', A(t0) = A'(t0) = 0; returns (A, A')
    w = F_gamma / kappa_bar
    g = -(w * w) * grid.times**2 * xprime
    dA = _cumulative(g, grid.dt)
    return _cumulative(dA, grid.dt), dA


def compute_A(xprime_component: SampledFunction, F_gamma: float, kappa_bar: float) -> SampledFunction:
    """Auxiliary function of the quadratic-space map, zero value and slope at t0."""
    A, _ = _a_function(xprime_component.values, xprime_component.grid, F_gamma, kappa_bar)
    return SampledFunction(xprime_component.grid, A)


def _check_primed(traj: Trajectory, spec: DeformationSpec, kind: Kind):
    if spec.kind is not kind:
        raise ConfigurationError(f"expected a {kind.value} spec, got {spec.kind.value}")
    ts = traj.spec
    if ts is None:
        return
    if ts.kind is not kind or (ts.k, ts.l, ts.gamma) != (spec.k, spec.l, spec.gamma):
        raise ValueError(f"trajectory was produced by {ts.describe()}, not {spec.describe()}")


def _indices(spec):
    return spec.k - 1, spec.l - 1, spec.gamma - 1


def transform_t2(traj_primed: Trajectory, spec: DeformationSpec, fm: ForceMass) -> Trajectory:
    """Commutative-frame coordinates of a Lie2-space trajectory.

    x_g = x'_g - (F_k/kh) I[x'_l] + (F_l/kh) I[x'_k]
    x_l = x'_l - 2 (F_g/kh) I[x'_k] - (F_g/kh)^2 II[x'_l]
    x_k = x'_k + 2 (F_g/kh) I[x'_l] - (F_g/kh)^2 II[x'_k]

    with I the running integral and II its repeat. Velocities are the exact
    time derivatives of these expressions.
    """
    _check_primed(traj_primed, spec, Kind.LIE2)
    k, l, g = _indices(spec)
    c = 1.0 / spec.kappa_hat
    F = fm.F
    w = F[g] * c
    dt = traj_primed.grid.dt
    xp, vp = traj_primed.x, traj_primed.v
    Ik, Il = _cumulative(xp[:, k], dt), _cumulative(xp[:, l], dt)
    IIk, IIl = _cumulative(Ik, dt), _cumulative(Il, dt)

    x = xp.copy()
    v = vp.copy()
    x[:, g] += -c * F[k] * Il + c * F[l] * Ik
    v[:, g] += -c * F[k] * xp[:, l] + c * F[l] * xp[:, k]
    x[:, l] += -2.0 * w * Ik - w * w * IIl
    v[:, l] += -2.0 * w * xp[:, k] - w * w * Il
    x[:, k] += 2.0 * w * Il - w * w * IIk
    v[:, k] += 2.0 * w * xp[:, l] - w * w * Ik
    return Trajectory(traj_primed.grid, x, v, spec=DeformationSpec.commutative(), fm=fm,
                      method=f"{traj_primed.method}+t2")


def transform_t3(traj_primed: Trajectory, spec: DeformationSpec, fm: ForceMass) -> Trajectory:
    """Commutative-frame coordinates of a quadratic-space trajectory."""
    _check_primed(traj_primed, spec, Kind.QUADRATIC)
    k, l, g = _indices(spec)
    c = 1.0 / spec.kappa_bar
    F = fm.F
    w = F[g] * c
    grid = traj_primed.grid
    t, dt = grid.times, grid.dt
    xp, vp = traj_primed.x, traj_primed.v

    Ik, Il = _cumulative(xp[:, k], dt), _cumulative(xp[:, l], dt)
    IIk, IIl = _cumulative(Ik, dt), _cumulative(Il, dt)
    Jk, Jl = _cumulative(t * xp[:, k], dt), _cumulative(t * xp[:, l], dt)
    Ak, dAk = _a_function(xp[:, k], grid, F[g], spec.kappa_bar)
    Al, dAl = _a_function(xp[:, l], grid, F[g], spec.kappa_bar)

    x = xp.copy()
    v = vp.copy()
    x[:, k] += w * Jl + w * t * Il - 2.0 * w * IIl + Ak
    v[:, k] += 2.0 * w * t * xp[:, l] - w * Il + dAk
    x[:, l] += -w * Jk - w * t * Ik + 2.0 * w * IIk + Al
    v[:, l] += -2.0 * w * t * xp[:, k] + w * Ik + dAl
    x[:, g] += -c * F[k] * Jl + c * F[l] * Jk
    v[:, g] += -c * F[k] * t * xp[:, l] + c * F[l] * t * xp[:, k]
    return Trajectory(grid, x, v, spec=DeformationSpec.commutative(), fm=fm,
                      method=f"{traj_primed.method}+t3")
