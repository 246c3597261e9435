"""The five phase spaces and their Newton systems.

Indices in :class:`DeformationSpec` are one-based (1, 2, 3) as written in
physics texts; kernels get zero-based copies.

Flow convention: H = |p|^2 / (2m) - F.x and zdot = {z, H}. With this sign
the bracket flow of every space reproduces its closed-form Newton system.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .poisson import ConfigurationError, PoissonStructure, _finite_vector


class Kind(str, enum.Enum):
    COMMUTATIVE = "commutative"
    CANONICAL = "canonical"
    LIE1 = "lie1"
    LIE2 = "lie2"
    QUADRATIC = "quadratic"


_KIND_CODE = {
    Kind.COMMUTATIVE: K.KIND_COMMUTATIVE,
    Kind.CANONICAL: K.KIND_CANONICAL,
    Kind.LIE1: K.KIND_LIE1,
    Kind.LIE2: K.KIND_LIE2,
    Kind.QUADRATIC: K.KIND_QUADRATIC,
}

# which scale parameter each kind uses
PARAMETER_NAME = {Kind.LIE1: "kappa", Kind.LIE2: "kappa_hat", Kind.QUADRATIC: "kappa_bar"}


def _check_scale(name, value):
    # inf is admitted as the undeformed limit point (1/kappa = 0)
    if value is None:
        raise ConfigurationError(f"{name} is required")
    value = float(value)
    if math.isnan(value) or value <= 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")
    return value


def _check_indices(names, values):
    for n, v in zip(names, values):
        if v not in (1, 2, 3):
            raise ConfigurationError(f"{n} must be one of 1, 2, 3, got {v!r}")
    if len(set(values)) != len(values):
        joined = ", ".join(f"{n}={v}" for n, v in zip(names, values))
        raise ConfigurationError(f"indices must be pairwise distinct: {joined}")


@dataclass(frozen=True)
class DeformationSpec:
    """Which phase space, its deformation parameter and its fixed indices.

    Use the classmethod constructors; only fields relevant to ``kind`` may
    be set.
    """

    kind: Kind
    theta: tuple[float, float, float] | None = None  # (theta12, theta13, theta23)
    kappa: float | None = None
    kappa_hat: float | None = None
    kappa_bar: float | None = None
    rho: int | None = None
    tau: int | None = None
    k: int | None = None
    l: int | None = None
    gamma: int | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        allowed = {
            Kind.COMMUTATIVE: set(),
            Kind.CANONICAL: {"theta"},
            Kind.LIE1: {"kappa", "rho", "tau"},
            Kind.LIE2: {"kappa_hat", "k", "l", "gamma"},
            Kind.QUADRATIC: {"kappa_bar", "k", "l", "gamma"},
        }[kind]
        for name in ("theta", "kappa", "kappa_hat", "kappa_bar", "rho", "tau", "k", "l", "gamma"):
            if name not in allowed and getattr(self, name) is not None:
                raise ConfigurationError(f"{name} is not a parameter of the {kind.value} space")
        if kind is Kind.CANONICAL:
            theta = tuple(float(v) for v in (self.theta or (0.0, 0.0, 0.0)))
            if len(theta) != 3 or not all(math.isfinite(v) for v in theta):
                raise ConfigurationError(f"theta must be three finite numbers, got {self.theta}")
            object.__setattr__(self, "theta", theta)
        elif kind is Kind.LIE1:
            object.__setattr__(self, "kappa", _check_scale("kappa", self.kappa))
            _check_indices(("rho", "tau"), (self.rho, self.tau))
        elif kind in (Kind.LIE2, Kind.QUADRATIC):
            name = PARAMETER_NAME[kind]
            object.__setattr__(self, name, _check_scale(name, getattr(self, name)))
            _check_indices(("k", "l", "gamma"), (self.k, self.l, self.gamma))

    @classmethod
    def commutative(cls):
        return cls(Kind.COMMUTATIVE)

    @classmethod
    def canonical(cls, theta12=0.0, theta13=0.0, theta23=0.0):
        return cls(Kind.CANONICAL, theta=(theta12, theta13, theta23))

    @classmethod
    def lie1(cls, kappa, rho=1, tau=2):
        return cls(Kind.LIE1, kappa=kappa, rho=rho, tau=tau)

    @classmethod
    def lie2(cls, kappa_hat, k=1, l=2, gamma=3):
        return cls(Kind.LIE2, kappa_hat=kappa_hat, k=k, l=l, gamma=gamma)

    @classmethod
    def quadratic(cls, kappa_bar, k=1, l=2, gamma=3):
        return cls(Kind.QUADRATIC, kappa_bar=kappa_bar, k=k, l=l, gamma=gamma)

    @property
    def scale(self) -> float | None:
        """The kappa-type parameter of this space, or None."""
        name = PARAMETER_NAME.get(self.kind)
        return getattr(self, name) if name else None

    def with_scale(self, value: float) -> "DeformationSpec":
        """Copy with the kappa-type parameter replaced."""
        name = PARAMETER_NAME.get(self.kind)
        if name is None:
            raise ConfigurationError(f"the {self.kind.value} space has no kappa-type parameter")
        kwargs = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kwargs[name] = value
        return DeformationSpec(**kwargs)

    def kernel_params(self) -> np.ndarray:
        P = np.zeros(K.N_PARAMS)
        P[K.P_KIND] = _KIND_CODE[self.kind]
        if self.kind is Kind.CANONICAL:
            P[K.P_TH12], P[K.P_TH13], P[K.P_TH23] = self.theta
        elif self.kind is Kind.LIE1:
            P[K.P_INV] = 1.0 / self.kappa
            P[K.P_RHO], P[K.P_TAU] = self.rho - 1, self.tau - 1
        elif self.kind in (Kind.LIE2, Kind.QUADRATIC):
            P[K.P_INV] = 1.0 / self.scale
            P[K.P_K], P[K.P_L], P[K.P_GAMMA] = self.k - 1, self.l - 1, self.gamma - 1
        return P

    def describe(self) -> str:
        if self.kind is Kind.CANONICAL:
            return "canonical(theta12={},theta13={},theta23={})".format(*self.theta)
        if self.kind is Kind.LIE1:
            return f"lie1(kappa={self.kappa},rho={self.rho},tau={self.tau})"
        if self.kind in (Kind.LIE2, Kind.QUADRATIC):
            name = PARAMETER_NAME[self.kind]
            return f"{self.kind.value}({name}={self.scale},k={self.k},l={self.l},gamma={self.gamma})"
        return "commutative"


@dataclass(frozen=True, eq=False)
class SecondOrderState:
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _finite_vector(self.x, "x"))
        object.__setattr__(self, "v", _finite_vector(self.v, "v"))


@dataclass(frozen=True, eq=False)
class ForceMass:
    F: np.ndarray
    m: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "F", _finite_vector(self.F, "force"))
        m = float(self.m)
        if not (math.isfinite(m) and m > 0):
            raise ConfigurationError(f"mass must be positive and finite, got {self.m}")
        object.__setattr__(self, "m", m)


def make_structure(spec: DeformationSpec, fm: ForceMass | None = None) -> PoissonStructure:
    """Bivector of the chosen space. ``fm`` is accepted but not used."""
    return PoissonStructure(spec.describe(), kernel_params=spec.kernel_params())


def newton_rhs(spec: DeformationSpec, fm: ForceMass, s: SecondOrderState, t: float) -> np.ndarray:
    """Acceleration from the closed-form Newton system of ``spec``."""
    out = np.empty(3)
    K.newton_accel(spec.kernel_params(), fm.m, fm.F, s.x, s.v, float(t), out)
    return out


def velocity_shift(spec: DeformationSpec, fm: ForceMass, x, t: float) -> np.ndarray:
    """g(x, t) with xdot = p/m + g(x, t) along the bracket flow."""
    z = np.zeros(6)
    z[:3] = np.asarray(x, dtype=float)
    out = np.empty(6)
    K.flow_rhs(spec.kernel_params(), fm.m, fm.F, z, float(t), np.empty((6, 6)), out)
    return out[:3]


def momentum_from_velocity(spec: DeformationSpec, fm: ForceMass, x, v, t: float) -> np.ndarray:
    """Momentum whose flow velocity at ``(x, t)`` is exactly ``v``."""
    return fm.m * (np.asarray(v, dtype=float) - velocity_shift(spec, fm, x, t))
