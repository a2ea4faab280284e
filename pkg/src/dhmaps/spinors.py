"""Spinor fields on chart domains and the operators acting on them.

Domains are flat R^n, the flat cylinder (R / 2 pi r Z) x R, or a conformal
surface ``exp(2u)(dx^2 + dy^2)``.  The orthonormal frame is always
``e_a = exp(-u) d_a`` (``u = 0`` on flat domains), so spinor components are
taken in that frame and Clifford multiplication by ``e_a`` is the a-th
generator of the representation.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fd
from .clifford import CliffordRep, build_representation
from .geometry import ConformalSurface, spin_connection_2d

PERIOD_TOL = 1e-12


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    dim: int
    kind: str = "flat"
    surface: Optional[ConformalSurface] = None
    period: Optional[float] = None  # period of coordinate 0 (cylinder)
    excluded: Optional[Callable] = field(default=None, repr=False)

    def check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,) or not np.all(np.isfinite(x)):
            raise DomainError(f"point {x} is not in the {self.kind} domain of dimension {self.dim}")
        if self.excluded is not None and self.excluded(x):
            raise DomainError(f"point {x} is excluded from the {self.kind} domain")
        return x

    def u(self, x):
        return 0.0 if self.surface is None else float(self.surface.u(x))

    def frame_scale(self, x):
        """``exp(-u)``: coordinate derivative -> frame derivative."""
        return float(np.exp(-self.u(x)))

    def volume_factor(self, x):
        return float(np.exp(self.dim * self.u(x)))

    def connection(self, x, h=fd.DEFAULT_STEP):
        """``w(e_a) = g(nabla_{e_a} e_1, e_2)``; zero on flat domains."""
        if self.surface is None:
            return np.zeros(self.dim)
        return spin_connection_2d(self.surface, x, h)


def flat(n):
    return Domain(n, "flat")


def cylinder(r):
    if not r > 0:
        raise ValueError("cylinder radius must be positive")
    return Domain(2, "cylinder", period=2 * np.pi * float(r))


def conformal(surface, excluded=None):
    return Domain(2, "conformal", surface=surface, excluded=excluded)


@dataclass(frozen=True)
class SpinorField:
    """Section of the spinor bundle given by a coordinate function.

    ``grad`` may return the exact coordinate partials, shape ``(dim, N)``;
    otherwise derivatives are central differences.
    """

    domain: Domain
    value: Callable = field(repr=False)
    grad: Optional[Callable] = field(default=None, repr=False)
    rep: Optional[CliffordRep] = field(default=None, repr=False)
    name: str = "Psi"

    def __post_init__(self):
        if self.rep is None:
            object.__setattr__(self, "rep", build_representation(self.domain.dim))
        if self.domain.period is not None:
            check_periodic(self)

    def __call__(self, x):
        x = self.domain.check(x)
        out = np.asarray(self.value(x), dtype=complex)
        if out.shape != (self.rep.fiber_dim,):
            raise ValueError(f"{self.name}: spinor of length {self.rep.fiber_dim} expected, got {out.shape}")
        return out

    def partials(self, x, h=fd.DEFAULT_STEP):
        x = self.domain.check(x)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=complex)
        return fd.gradient(self, x, h)

    @property
    def analytic(self):
        return self.grad is not None

    def without_gradient(self):
        """Same field, derivatives by finite differences."""
        return SpinorField(self.domain, self.value, None, self.rep, self.name)


def check_periodic(field_, samples=5):
    """Sample ``value(theta + period, t) == value(theta, t)``."""
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(samples):
        x = rng.uniform(-1.0, 1.0, size=field_.domain.dim)
        shifted = x.copy()
        shifted[0] += field_.domain.period
        a = np.asarray(field_.value(x), dtype=complex)
        b = np.asarray(field_.value(shifted), dtype=complex)
        worst = max(worst, float(np.abs(a - b).max() / max(1.0, np.abs(a).max())))
    if worst > PERIOD_TOL:
        raise DomainError(f"{field_.name} is not periodic on the cylinder (defect {worst:.3e})")
    return worst


def constant_field(domain, spinor, name="const"):
    spinor = np.asarray(spinor, dtype=complex)
    return SpinorField(
        domain, lambda x: spinor, lambda x: np.zeros((domain.dim, spinor.size), dtype=complex), name=name
    )


def covariant_derivatives(field_, x, h=fd.DEFAULT_STEP):
    """All ``nabla_{e_a} Psi`` at x, shape ``(dim, N)``."""
    x = field_.domain.check(x)
    dom = field_.domain
    out = dom.frame_scale(x) * field_.partials(x, h)
    if dom.surface is not None:
        g = field_.rep.generators
        w = dom.connection(x)
        spin = g[0] @ g[1] @ field_(x)
        out = out + 0.5 * w[:, None] * spin[None, :]
    return out


def covariant_derivative(field_, alpha, x, h=fd.DEFAULT_STEP):
    return covariant_derivatives(field_, x, h)[alpha]


def dirac(field_, x, h=fd.DEFAULT_STEP):
    """``sum_a e_a . nabla_{e_a} Psi``."""
    nab = covariant_derivatives(field_, x, h)
    return sum(g @ d for g, d in zip(field_.rep.generators, nab))


def twistor_residual(field_, x, X, h=fd.DEFAULT_STEP):
    """``nabla_X Psi + (1/n) X . Dirac(Psi)`` for a frame vector X."""
    X = np.asarray(X, dtype=float)
    nab = covariant_derivatives(field_, x, h)
    d = sum(g @ v for g, v in zip(field_.rep.generators, nab))
    return X @ nab + field_.rep.matrix(X) @ d / field_.rep.n


def max_twistor_residual(field_, points, h=fd.DEFAULT_STEP):
    """Max over points and frame vectors e_a of the twistor residual norm."""
    eye = np.eye(field_.domain.dim)
    return max(
        float(np.linalg.norm(twistor_residual(field_, x, e, h))) for x in points for e in eye
    )


def harmonic_residual(field_, points, h=fd.DEFAULT_STEP):
    """``max_x |Dirac(Psi)(x)|`` over the grid points."""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise ValueError("empty grid")
    return max(float(np.linalg.norm(dirac(field_, x, h))) for x in points)
