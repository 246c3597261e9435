"""Residuals, trajectory comparison and convergence/limit checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .dynamics import TimeGrid, Trajectory, integrate_newton
from .poisson import CheckReport
from .spaces import DeformationSpec, ForceMass, SecondOrderState

__all__ = [
    "CheckReport", "ComparisonResult", "fd_acceleration", "newton_force", "newton_residual",
    "compare_trajectories", "convergence_order", "kappa_limit_sweep",
]

ForceLaw = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ComparisonResult:
    max_abs: float
    l2: float
    argmax_time: float


def fd_acceleration(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Fourth-order central second derivative of positions.

    Returns ``(t, a)`` on the interior nodes; the first and last two nodes
    are dropped.
    """
    if len(traj) < 5:
        raise ValueError("finite-difference acceleration needs at least 5 samples")
    a = K.second_derivative(np.ascontiguousarray(traj.x), float(traj.grid.dt))
    return traj.t[2:-2], a


def newton_force(spec: DeformationSpec, fm: ForceMass) -> ForceLaw:
    """m times the closed-form acceleration of ``spec``, vectorised over nodes."""
    P = spec.kernel_params()

    def force(t, x, v):
        out = np.empty((len(t), 3))
        a = np.empty(3)
        for n in range(len(t)):
            K.newton_accel(P, fm.m, fm.F, x[n], v[n], float(t[n]), a)
            out[n] = fm.m * a
        return out

    return force


def newton_residual(traj: Trajectory, fm: ForceMass, rhs: ForceLaw | None = None, *,
                    tol: float = 1e-4, name: str = "newton-residual") -> CheckReport:
    """max |m a_fd - rhs| over interior nodes and components.

    ``rhs(t, x, v)`` defaults to the constant force ``F``.
    """
    t, a = fd_acceleration(traj)
    x, v = traj.x[2:-2], traj.v[2:-2]
    target = np.broadcast_to(fm.F, a.shape) if rhs is None else rhs(t, x, v)
    dev = np.abs(fm.m * a - target)
    node, comp = np.unravel_index(np.argmax(dev), dev.shape)
    return CheckReport(name, float(dev[node, comp]), tol,
                       {"worst_time": float(t[node]), "worst_component": int(comp) + 1,
                        "dt": traj.grid.dt, "method": traj.method})


def compare_trajectories(a: Trajectory, b: Trajectory) -> ComparisonResult:
    """Position deviation: max norm, time-L2 norm and the time of the max."""
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")
    d = np.abs(a.x - b.x)
    per_node = d.max(axis=1)
    n = int(np.argmax(per_node))
    l2 = math.sqrt(a.grid.dt * float(np.sum(d * d)))
    return ComparisonResult(float(per_node[n]), l2, float(a.t[n]))


def convergence_order(errors: Sequence[tuple[float, float]], floor: float = 0.0) -> float:
    """Least-squares slope of log(error) against log(dt).

    An error at or below ``floor`` means the method is exact at that
    resolution (up to roundoff); the order is then reported as ``inf``.
    """
    pts = np.asarray(errors, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (dt, error) pairs")
    dts, errs = pts[:, 0], pts[:, 1]
    if np.any(np.diff(dts) >= 0):
        raise ValueError("dt values must be strictly decreasing")
    if np.any(errs <= floor):
        return math.inf
    return float(np.polyfit(np.log(dts), np.log(errs), 1)[0])


def kappa_limit_sweep(spec: DeformationSpec, fm: ForceMass, s0: SecondOrderState, grid: TimeGrid,
                      factors: Sequence[float] = (1, 2, 4, 8), *, max_slope: float = -0.9) -> CheckReport:
    """Deviation from the commutative run as the deformation scale grows.

    Measured value is the log-log slope of deviation against scale factor;
    passes when it is below ``max_slope``. If every deviation vanishes the
    slope is reported as ``-inf``.
    """
    factors = [float(c) for c in factors]
    if len(factors) < 2 or any(b <= a for a, b in zip(factors, factors[1:])):
        raise ValueError("factors must be increasing with at least two entries")
    base = integrate_newton(DeformationSpec.commutative(), fm, s0, grid)
    kappa0 = spec.scale
    devs = []
    for c in factors:
        run = integrate_newton(spec.with_scale(c * kappa0), fm, s0, grid)
        devs.append(compare_trajectories(run, base).max_abs)
    if any(d == 0 for d in devs):
        slope = -math.inf
    else:
        slope = float(np.polyfit(np.log(factors), np.log(devs), 1)[0])
    return CheckReport(f"limit-sweep[{spec.kind.value}]", slope, max_slope,
                       {"factors": factors, "deviations": devs, "scale0": kappa0})
