"""Poisson bivectors on the six-dimensional phase space (x1, x2, x3, p1, p2, p3).

A :class:`PoissonStructure` is stored as its strict upper triangle; the lower
triangle is always the mirrored negative, so every matrix it returns is
exactly antisymmetric.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import _kernels

Entry = Callable[[np.ndarray, float], float]

COORD_NAMES = ("x1", "x2", "x3", "p1", "p2", "p3")


class ConfigurationError(ValueError):
    """Invalid parameters for a structure, space, grid or run."""


def _finite_vector(v, name, size=3):
    arr = np.array(v, dtype=float).reshape(-1)
    if arr.shape != (size,):
        raise ConfigurationError(f"{name} must have {size} components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} must be finite, got {arr}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PhasePoint:
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _finite_vector(self.x, "x"))
        object.__setattr__(self, "p", _finite_vector(self.p, "p"))

    @property
    def z(self) -> np.ndarray:
        return np.concatenate((self.x, self.p))

    @classmethod
    def from_vector(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        return cls(z[:3], z[3:])


def as_phase_vector(z) -> np.ndarray:
    """Accept a :class:`PhasePoint` or any 6-sequence and return a float array."""
    if isinstance(z, PhasePoint):
        return z.z
    arr = np.asarray(z, dtype=float).reshape(-1)
    if arr.shape != (6,):
        raise ValueError(f"phase point must have 6 components, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True, eq=False)
class PoissonStructure:
    """Antisymmetric bivector Pi(z, t) with Pi[a, b] = {z_a, z_b}.

    Parameters
    ----------
    label : str
        Identifying name, used in reports.
    entries : mapping of (a, b) -> callable, optional
        Strict upper-triangle entries ``a < b`` as functions of ``(z, t)``.
        Unlisted entries are zero.
    kernel_params : ndarray, optional
        Parameter vector of a built-in space. When present the matrix is
        filled by the compiled kernel and ``entries`` is ignored.
    """

    label: str
    entries: Mapping[tuple[int, int], Entry] = field(default_factory=dict)
    kernel_params: np.ndarray | None = None

    def __post_init__(self):
        for (a, b) in self.entries:
            if not (0 <= a < b < 6):
                raise ConfigurationError(
                    f"bivector entry ({a}, {b}) is not in the strict upper triangle")
        if self.kernel_params is not None:
            params = np.array(self.kernel_params, dtype=float)
            params.setflags(write=False)
            object.__setattr__(self, "kernel_params", params)

    def __call__(self, z, t: float) -> np.ndarray:
        return evaluate_bivector(self, z, t)


def evaluate_bivector(s: PoissonStructure, z, t: float) -> np.ndarray:
    """Return the 6x6 matrix of elementary brackets of ``s`` at ``(z, t)``."""
    zv = as_phase_vector(z)
    out = np.zeros((6, 6))
    if s.kernel_params is not None:
        _kernels.fill_bivector(s.kernel_params, zv, float(t), out)
        return out
    for (a, b), fn in s.entries.items():
        val = float(fn(zv, t))
        out[a, b] = val
        out[b, a] = -val
    return out


def canonical_structure(label: str = "commutative") -> PoissonStructure:
    """The undeformed brackets {x_i, p_j} = delta_ij."""
    return PoissonStructure(label, {(i, 3 + i): (lambda z, t: 1.0) for i in range(3)})


def broken_control_structure() -> PoissonStructure:
    """Canonical brackets plus {x1, x2} = x1**2.

    Not a Poisson structure: the cyclic sum for (x1, x2, p1) equals -2 x1.
    Serves as the negative control of the Jacobi checker.
    """
    entries = {(i, 3 + i): (lambda z, t: 1.0) for i in range(3)}
    entries[(0, 1)] = lambda z, t: z[0] ** 2
    return PoissonStructure("broken-control", entries)


def _bivector_derivatives(s: PoissonStructure, z: np.ndarray, t: float, h: float) -> np.ndarray:
    # dPi[d, b, c] = central difference of Pi[b, c] along phase coordinate d
    dPi = np.empty((6, 6, 6))
    for d in range(6):
        zp = z.copy()
        zm = z.copy()
        zp[d] += h
        zm[d] -= h
        dPi[d] = (evaluate_bivector(s, zp, t) - evaluate_bivector(s, zm, t)) / (2.0 * h)
    return dPi


def jacobi_tensor(s: PoissonStructure, z, t: float, h: float = 1e-4) -> np.ndarray:
    """Cyclic sum J[a, b, c] = sum_d Pi_ad d_d Pi_bc + Pi_bd d_d Pi_ca + Pi_cd d_d Pi_ab.

    ``t`` is held fixed; only phase coordinates are differentiated.
    """
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    zv = as_phase_vector(z)
    Pi = evaluate_bivector(s, zv, t)
    dPi = _bivector_derivatives(s, zv, t, h)
    term = np.einsum("ad,dbc->abc", Pi, dPi)
    return term + term.transpose(1, 2, 0) + term.transpose(2, 0, 1)


def jacobi_residual(s: PoissonStructure, z, t: float, h: float = 1e-4) -> float:
    """Largest absolute cyclic sum over all index triples."""
    return float(np.max(np.abs(jacobi_tensor(s, z, t, h))))


@dataclass(frozen=True)
class JacobiSampleConfig:
    """Sampling box for :func:`verify_jacobi`.

    Points are drawn with ``numpy.random.default_rng(seed)`` (PCG64). Each
    sample consumes, in order, three uniform x components, three uniform p
    components and one uniform time.
    """

    sample_count: int = 100
    x_range: tuple[float, float] = (-10.0, 10.0)
    p_range: tuple[float, float] = (-10.0, 10.0)
    time_range: tuple[float, float] = (0.0, 5.0)
    fd_step: float = 1e-4
    seed: int = 42

    def __post_init__(self):
        if self.sample_count < 1:
            raise ConfigurationError("sample_count must be at least 1")
        if not self.fd_step > 0:
            raise ConfigurationError("fd_step must be positive")
        for name in ("x_range", "p_range", "time_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ConfigurationError(f"{name} must be a nonempty interval, got ({lo}, {hi})")

    def samples(self):
        """Yield ``(z, t)`` pairs reproducibly."""
        rng = np.random.default_rng(self.seed)
        for _ in range(self.sample_count):
            x = rng.uniform(*self.x_range, size=3)
            p = rng.uniform(*self.p_range, size=3)
            t = rng.uniform(*self.time_range)
            yield np.concatenate((x, p)), float(t)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification; ``passed`` is ``measured < tolerance``."""

    name: str
    measured: float
    tolerance: float
    details: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return bool(self.measured < self.tolerance)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return f"{self.name} {self.status} {float(self.measured)!r} {float(self.tolerance)!r}"


def verify_jacobi(s: PoissonStructure, cfg: JacobiSampleConfig | None = None,
                  tol: float = 1e-7) -> CheckReport:
    """Sample the Jacobi residual of ``s`` and report the worst point."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    cfg = cfg or JacobiSampleConfig()
    worst, worst_z, worst_t, worst_triple = -1.0, None, None, None
    for z, t in cfg.samples():
        J = np.abs(jacobi_tensor(s, z, t, cfg.fd_step))
        r = float(J.max())
        if r > worst:
            worst, worst_z, worst_t = r, z, t
            worst_triple = tuple(COORD_NAMES[i] for i in np.unravel_index(np.argmax(J), J.shape))
    return CheckReport(
        name=f"jacobi[{s.label}]",
        measured=worst,
        tolerance=tol,
        details={
            "worst_z": worst_z.tolist(),
            "worst_t": worst_t,
            "worst_triple": worst_triple,
            "sample_count": cfg.sample_count,
            "x_range": cfg.x_range,
            "p_range": cfg.p_range,
            "time_range": cfg.time_range,
            "fd_step": cfg.fd_step,
            "seed": cfg.seed,
        },
    )
