"""Hamiltonian flow and Newton-system integration on uniform time grids."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .poisson import ConfigurationError, PoissonStructure, as_phase_vector, evaluate_bivector
from .spaces import DeformationSpec, ForceMass, SecondOrderState, make_structure, momentum_from_velocity


class IntegrationBlowup(RuntimeError):
    """A state became non-finite or exceeded the runaway threshold."""

    def __init__(self, node: int, time: float):
        super().__init__(f"integration blew up at node {node} (t={time!r})")
        self.node = node
        self.time = time


@dataclass(frozen=True)
class TimeGrid:
    t0: float = 0.0
    t_end: float = 1.0
    dt: float = 1e-3

    def __post_init__(self):
        for name in ("t0", "t_end", "dt"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if not self.t_end > self.t0:
            raise ConfigurationError(f"t_end must exceed t0, got [{self.t0}, {self.t_end}]")
        span = (self.t_end - self.t0) / self.dt
        if span > 2**31:
            raise ConfigurationError("too many grid nodes")
        if abs(span - round(span)) > 1e-6:
            raise ConfigurationError(
                f"(t_end - t0) / dt = {span} is not an integer number of steps")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_nodes) * self.dt


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Positions and true velocities on a grid, with the run's metadata.

    ``p`` holds canonical momenta for flow runs and is None otherwise.
    """

    grid: TimeGrid
    x: np.ndarray
    v: np.ndarray
    spec: DeformationSpec | None = None
    fm: ForceMass | None = None
    method: str = ""
    p: np.ndarray | None = None

    def __post_init__(self):
        n = self.grid.n_nodes
        if self.x.shape != (n, 3) or self.v.shape != (n, 3):
            raise ValueError(f"expected ({n}, 3) position and velocity arrays, "
                             f"got {self.x.shape} and {self.v.shape}")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.v))):
            raise ValueError("trajectory contains non-finite values")

    @property
    def t(self) -> np.ndarray:
        return self.grid.times

    def __len__(self):
        return self.grid.n_nodes

    def state(self, n: int) -> SecondOrderState:
        return SecondOrderState(self.x[n], self.v[n])

    @property
    def states(self) -> list[SecondOrderState]:
        return [self.state(n) for n in range(len(self))]


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """H = |p|^2/(2m) - F.x for a constant force."""

    fm: ForceMass

    def __call__(self, z) -> float:
        return hamiltonian_value(self, z)

    def gradient(self, z) -> np.ndarray:
        zv = as_phase_vector(z)
        return np.concatenate((-self.fm.F, zv[3:] / self.fm.m))


def hamiltonian_value(h: Hamiltonian, z) -> float:
    zv = as_phase_vector(z)
    p = zv[3:]
    return float(p @ p / (2.0 * h.fm.m) - h.fm.F @ zv[:3])


def energy_along(traj: Trajectory) -> np.ndarray:
    """H at every node of a flow trajectory."""
    if traj.p is None:
        raise ValueError("energy needs canonical momenta; use a flow trajectory")
    return (np.einsum("ni,ni->n", traj.p, traj.p) / (2.0 * traj.fm.m) - traj.x @ traj.fm.F)


def hamiltonian_vector_field(s: PoissonStructure, h: Hamiltonian, z, t: float) -> np.ndarray:
    """zdot = Pi(z, t) grad H(z), with the gradient taken analytically."""
    zv = as_phase_vector(z)
    return evaluate_bivector(s, zv, t) @ h.gradient(zv)


def _raise_blowup(bad: int, grid: TimeGrid):
    if bad >= 0:
        raise IntegrationBlowup(bad, grid.t0 + bad * grid.dt)


def _rk4_generic(rhs, y0, grid: TimeGrid):
    # python-level RK4 for structures without a compiled kernel
    n, dt = grid.n_steps, grid.dt
    Y = np.empty((n + 1, y0.shape[0]))
    Y[0] = y0
    for i in range(n):
        t = grid.t0 + i * dt
        y = Y[i]
        k1 = rhs(y, t)
        k2 = rhs(y + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = rhs(y + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = rhs(y + dt * k3, t + dt)
        Y[i + 1] = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(Y[i + 1])) or np.max(np.abs(Y[i + 1])) > K.BLOWUP_LIMIT:
            _raise_blowup(i + 1, grid)
    return Y


def _rk45(rhs, y0, grid: TimeGrid, rtol: float):
    from scipy.integrate import solve_ivp

    sol = solve_ivp(lambda t, y: rhs(y, t), (grid.t0, grid.t0 + grid.n_steps * grid.dt), y0,
                    method="RK45", t_eval=grid.times, rtol=rtol, atol=rtol * 1e-3)
    if not sol.success:
        raise IntegrationBlowup(len(sol.t), float(sol.t[-1]) if len(sol.t) else grid.t0)
    Y = sol.y.T
    if not np.all(np.isfinite(Y)) or np.max(np.abs(Y)) > K.BLOWUP_LIMIT:
        bad = int(np.argmax(~np.isfinite(Y).all(axis=1) | (np.abs(Y) > K.BLOWUP_LIMIT).any(axis=1)))
        _raise_blowup(bad, grid)
    return Y


def integrate_flow(s: PoissonStructure, h: Hamiltonian, z0, grid: TimeGrid, *,
                   spec: DeformationSpec | None = None, method: str = "rk4",
                   rtol: float = 1e-10) -> Trajectory:
    """Integrate zdot = Pi grad H and report x with the flow velocity xdot.

    ``method`` is ``"rk4"`` (fixed step, the reference) or ``"rk45"``
    (adaptive Dormand-Prince resampled onto the grid).
    """
    zv = as_phase_vector(z0).copy()
    fm = h.fm
    if method == "rk4" and s.kernel_params is not None:
        Z = np.empty((grid.n_nodes, 6))
        V = np.empty((grid.n_nodes, 3))
        bad = K.rk4_flow(s.kernel_params, fm.m, fm.F, zv, float(grid.t0), float(grid.dt),
                         grid.n_steps, Z, V)
        _raise_blowup(bad, grid)
    else:
        def rhs(y, t):
            return hamiltonian_vector_field(s, h, y, t)

        if method == "rk4":
            Z = _rk4_generic(rhs, zv, grid)
        elif method == "rk45":
            Z = _rk45(rhs, zv, grid, rtol)
        else:
            raise ConfigurationError(f"unknown integrator {method!r}")
        V = np.array([rhs(z, t)[:3] for z, t in zip(Z, grid.times)])
    return Trajectory(grid, Z[:, :3].copy(), V, spec=spec, fm=fm, method=f"{method}-flow",
                      p=Z[:, 3:].copy())


def integrate_newton(spec: DeformationSpec, fm: ForceMass, s0: SecondOrderState, grid: TimeGrid,
                     *, method: str = "rk4", rtol: float = 1e-10) -> Trajectory:
    """Integrate the closed-form Newton system of ``spec`` from ``(x0, v0)``."""
    P = spec.kernel_params()
    if method == "rk4":
        X = np.empty((grid.n_nodes, 3))
        V = np.empty((grid.n_nodes, 3))
        bad = K.rk4_newton(P, fm.m, fm.F, s0.x.copy(), s0.v.copy(), float(grid.t0),
                           float(grid.dt), grid.n_steps, X, V)
        _raise_blowup(bad, grid)
    elif method == "rk45":
        def rhs(y, t):
            a = np.empty(3)
            K.newton_accel(P, fm.m, fm.F, y[:3], y[3:], t, a)
            return np.concatenate((y[3:], a))

        Y = _rk45(rhs, np.concatenate((s0.x, s0.v)), grid, rtol)
        X, V = Y[:, :3].copy(), Y[:, 3:].copy()
    else:
        raise ConfigurationError(f"unknown integrator {method!r}")
    return Trajectory(grid, X, V, spec=spec, fm=fm, method=f"{method}-newton")


def simulate_flow(spec: DeformationSpec, fm: ForceMass, s0: SecondOrderState, grid: TimeGrid,
                  *, method: str = "rk4", rtol: float = 1e-10) -> Trajectory:
    """Bracket-flow run started with the momentum that reproduces ``s0.v``."""
    p0 = momentum_from_velocity(spec, fm, s0.x, s0.v, grid.t0)
    return integrate_flow(make_structure(spec, fm), Hamiltonian(fm), np.concatenate((s0.x, p0)),
                          grid, spec=spec, method=method, rtol=rtol)


def exact_commutative_trajectory(fm: ForceMass, s0: SecondOrderState, grid: TimeGrid) -> Trajectory:
    """Closed-form solution x0 + v0 (t - t0) + F (t - t0)^2 / (2m) of m xddot = F."""
    tau = (grid.times - grid.t0)[:, None]
    a = fm.F / fm.m
    x = s0.x + s0.v * tau + 0.5 * a * tau**2
    v = s0.v + a * tau
    return Trajectory(grid, x, v, spec=DeformationSpec.commutative(), fm=fm, method="exact")
