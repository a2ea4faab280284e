"""Target and domain geometries.

Space forms carry both an ambient description (quadric in Euclidean or
Minkowski space, with tangent projector) and a graph chart over the first
``dim`` ambient coordinates.  Complex projective space is modelled in an
affine chart with the Fubini-Study metric of holomorphic sectional
curvature 4.  Christoffel symbols and the Riemann tensor of chart metrics
are computed by central differences.

Curvature convention: ``R(d_k, d_l) d_j = R^i_{jkl} d_i`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``, so a space of constant
curvature c has ``R^i_{jkl} = c (delta^i_k g_jl - delta^i_l g_jk)``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fd

QUADRIC_TOL = 1e-12


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class Ambient:
    """Quadric ``{x : q(x, x) = level}`` in R^dim with diagonal form ``signature``."""

    dim: int
    signature: np.ndarray = field(repr=False)
    level: float = 0.0
    # flat targets have no constraint; the projector is then the identity
    constrained: bool = True

    def q(self, u, v):
        """Bilinear form, contracted over the last axis (no conjugation)."""
        return np.tensordot(np.asarray(u) * self.signature, np.asarray(v), axes=([-1], [-1]))

    def constraint_defect(self, x):
        if not self.constrained:
            return 0.0
        return abs(float(self.q(x, x)) - self.level)

    def project(self, x, v):
        """q-orthogonal projection of ``v`` (last axis) onto T_x of the quadric."""
        v = np.asarray(v)
        if not self.constrained:
            return v
        x = np.asarray(x, dtype=float)
        coef = np.tensordot(v, self.signature * x, axes=([-1], [-1])) / self.level
        return v - coef[..., None] * x

    def projector(self, x):
        """Matrix P with ``P @ v`` equal to ``project(x, v)``."""
        x = np.asarray(x, dtype=float)
        eye = np.eye(self.dim)
        if not self.constrained:
            return eye
        return eye - np.outer(x, self.signature * x) / self.level

    def normal_vector(self, x):
        """Position-like normal of the quadric (q-orthogonal to every tangent vector)."""
        return np.asarray(x, dtype=float)

    def tangent_frame(self, x, rng=None):
        """q-orthonormal basis of T_x, shape ``(m, dim)``.

        With ``rng`` the basis is randomly rotated, which exercises frame
        independence.
        """
        x = np.asarray(x, dtype=float)
        m = self.dim - 1 if self.constrained else self.dim
        seeds = np.eye(self.dim) if rng is None else rng.normal(size=(self.dim, self.dim))
        basis = []
        for s in seeds:
            v = self.project(x, s)
            for b in basis:
                v = v - self.q(v, b) * b
            nrm2 = float(self.q(v, v))
            if nrm2 > 1e-10:
                basis.append(v / np.sqrt(nrm2))
            if len(basis) == m:
                break
        if len(basis) < m:
            raise ValueError("could not build a tangent frame at this point")
        return np.array(basis)


@dataclass(frozen=True)
class RiemannianModel:
    """A Riemannian manifold described on one chart.

    ``metric(y)`` returns the chart metric matrix.  ``curvature`` is the
    constant sectional curvature when known, else None (numeric curvature).
    ``ambient`` and ``to_ambient`` are set for embedded space forms.
    """

    name: str
    dim: int
    metric: Callable = field(repr=False)
    curvature: Optional[float] = None
    ambient: Optional[Ambient] = None
    to_ambient: Optional[Callable] = field(default=None, repr=False)
    chart_bound: Optional[float] = None

    def check_chart(self, y):
        if self.chart_bound is not None and np.linalg.norm(y) > self.chart_bound:
            raise ChartError(f"{self.name}: point {y} outside chart bound {self.chart_bound}")

    def metric_at(self, y):
        y = np.asarray(y, dtype=float)
        self.check_chart(y)
        return np.asarray(self.metric(y), dtype=float)

    @property
    def embedded(self):
        return self.ambient is not None


def space_form(kind, dim, radius=1.0):
    """Hyperbolic space, round sphere or flat space of dimension ``dim``.

    hyperbolic: ``q(x, x) = -R^2`` in Minkowski R^(dim+1), c = -1/R^2.
    sphere: ``|x|^2 = R^2`` in R^(dim+1), c = 1/R^2.
    flat: R^dim, c = 0.
    The chart is the graph over the first ``dim`` ambient coordinates.
    """
    if kind != "flat" and not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    R2 = float(radius) ** 2
    if kind == "hyperbolic":
        sig = np.ones(dim + 1)
        sig[-1] = -1.0
        amb = Ambient(dim + 1, sig, -R2)

        def metric(y):
            return np.eye(dim) - np.outer(y, y) / (R2 + y @ y)

        def to_ambient(y):
            y = np.asarray(y, dtype=float)
            return np.append(y, np.sqrt(R2 + y @ y))

        return RiemannianModel(f"H^{dim}({radius})", dim, metric, -1.0 / R2, amb, to_ambient)
    if kind == "sphere":
        amb = Ambient(dim + 1, np.ones(dim + 1), R2)

        def metric(y):
            return np.eye(dim) + np.outer(y, y) / (R2 - y @ y)

        def to_ambient(y):
            y = np.asarray(y, dtype=float)
            return np.append(y, np.sqrt(R2 - y @ y))

        return RiemannianModel(
            f"S^{dim}({radius})", dim, metric, 1.0 / R2, amb, to_ambient,
            chart_bound=float(radius) * (1 - 1e-9),
        )
    if kind == "flat":
        amb = Ambient(dim, np.ones(dim), 0.0, constrained=False)
        return RiemannianModel(
            f"R^{dim}", dim, lambda y: np.eye(dim), 0.0, amb, lambda y: np.asarray(y, dtype=float)
        )
    raise ValueError(f"unknown space form kind {kind!r}")


# -- complex projective space -------------------------------------------------

def realify(z):
    """C^n -> R^2n as (Re z1, Im z1, Re z2, ...)."""
    z = np.asarray(z, dtype=complex)
    return np.stack([z.real, z.imag], axis=-1).reshape(z.shape[:-1] + (2 * z.shape[-1],))


def complexify(y):
    y = np.asarray(y, dtype=float)
    y = y.reshape(y.shape[:-1] + (-1, 2))
    return y[..., 0] + 1j * y[..., 1]


def fubini_study_hermitian(w):
    """``h_{i jbar} = ((1+|w|^2) delta_ij - conj(w_i) w_j) / (1+|w|^2)^2``."""
    w = np.asarray(w, dtype=complex)
    s = 1.0 + np.vdot(w, w).real
    return (s * np.eye(w.size) - np.outer(w.conj(), w)) / s**2


def fubini_study(n, bound=1e6):
    """CP^n in the affine chart [1, w_1, ..., w_n], realified to dimension 2n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    # real metric g(U, V) = Re sum h_ij U_i conj(V_j); unit complex basis 1, i
    units = np.array([1.0, 1j])
    phase = np.real(units[:, None] * units.conj()[None, :])
    iphase = np.real(1j * units[:, None] * units.conj()[None, :])

    def metric(y):
        h = fubini_study_hermitian(complexify(y))
        # Re(h u conj v) for u, v in {1, i}
        return np.kron(h.real, phase) + np.kron(h.imag, iphase)

    return RiemannianModel(f"CP^{n}", 2 * n, metric, None, chart_bound=bound)


# -- connection and curvature --------------------------------------------------

def metric_derivatives(model, y, h=fd.DEFAULT_STEP):
    """``dg[l, i, j] = d_l g_ij`` by central differences."""
    return fd.gradient(model.metric_at, y, h)


def christoffels(model, y, h=fd.DEFAULT_STEP):
    """``gamma[k, i, j] = Gamma^k_ij``, symmetric in (i, j)."""
    y = np.asarray(y, dtype=float)
    g = model.metric_at(y)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"singular metric at {y}") from exc
    if np.linalg.cond(g) > 1e12:
        raise ValueError(f"singular metric at {y}")
    dg = metric_derivatives(model, y, h)
    # lower[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    lower = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", ginv, lower)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def constant_curvature_riemann(c, gram=None, dim=None):
    """``R^i_{jkl} = c (delta^i_k g_jl - delta^i_l g_jk)`` in a frame with Gram matrix ``gram``."""
    if gram is None:
        gram = np.eye(dim)
    gram = np.asarray(gram, dtype=float)
    eye = np.eye(gram.shape[0])
    return c * (np.einsum("ik,jl->ijkl", eye, gram) - np.einsum("il,jk->ijkl", eye, gram))


def riemann_numeric(model, y, h=fd.DEFAULT_STEP, h_outer=1e-3):
    """Chart Riemann tensor from FD Christoffels, antisymmetrised in (k, l)."""
    y = np.asarray(y, dtype=float)
    gam = christoffels(model, y, h)
    dgam = fd.gradient(lambda p: christoffels(model, p, h), y, h_outer)  # dgam[m, i, j, k]
    # R^i_{jkl} = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj
    r = (
        np.einsum("kilj->ijkl", dgam)
        - np.einsum("likj->ijkl", dgam)
        + np.einsum("ikm,mlj->ijkl", gam, gam)
        - np.einsum("ilm,mkj->ijkl", gam, gam)
    )
    return 0.5 * (r - r.transpose(0, 1, 3, 2))


def riemann_tensor(model, y, h=fd.DEFAULT_STEP):
    """Chart Riemann tensor: closed form for constant curvature, numeric otherwise."""
    if model.curvature is not None:
        return constant_curvature_riemann(model.curvature, model.metric_at(y))
    return riemann_numeric(model, y, h)


def sectional_curvature(riem, g, X, Y):
    """``g(R(X, Y) Y, X) / (|X|^2 |Y|^2 - g(X, Y)^2)``."""
    ryy = np.einsum("ijkl,j,k,l->i", riem, Y, X, Y)
    num = X @ g @ ryy
    den = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    return float(num / den)


# -- conformal surfaces ---------------------------------------------------------

@dataclass(frozen=True)
class ConformalSurface:
    """Surface chart with metric ``exp(2u) (dx^2 + dy^2)``.

    ``grad_u`` may supply the exact gradient; otherwise central differences
    are used.
    """

    u: Callable = field(repr=False)
    grad_u: Optional[Callable] = field(default=None, repr=False)
    name: str = "conformal"

    def factor(self, x):
        return float(np.exp(2.0 * self.u(np.asarray(x, dtype=float))))

    def gradient(self, x, h=fd.DEFAULT_STEP):
        x = np.asarray(x, dtype=float)
        if self.grad_u is not None:
            return np.asarray(self.grad_u(x), dtype=float)
        return fd.gradient(self.u, x, h)

    def gauss_curvature(self, x, h=1e-3):
        """``K = -exp(-2u) Laplacian(u)``."""
        x = np.asarray(x, dtype=float)
        lap = sum(fd.second_partial(self.u, x, a, h) for a in range(2))
        return float(-np.exp(-2.0 * self.u(x)) * lap)


def flat_surface():
    return ConformalSurface(lambda x: 0.0, lambda x: np.zeros(2), name="flat")


def spin_connection_2d(surface, x, h=fd.DEFAULT_STEP):
    """Connection coefficients ``w(e_a) = g(nabla_{e_a} e_1, e_2)`` for ``e_a = exp(-u) d_a``.

    Returns ``(-exp(-u) u_y, exp(-u) u_x)``.  The spinor covariant derivative is
    ``nabla_{e_a} = e_a + 1/2 w(e_a) e_1 . e_2 .``.
    """
    x = np.asarray(x, dtype=float)
    ux, uy = surface.gradient(x, h)
    s = np.exp(-surface.u(x))
    return np.array([-s * uy, s * ux])


def spin_connection_curvature(surface, x, h=1e-3):
    """Gauss curvature recomputed from the connection form: ``K = e2(w(e1)) - e1(w(e2)) - w(e1)^2 - w(e2)^2``."""
    x = np.asarray(x, dtype=float)
    s = np.exp(-surface.u(x))
    w = spin_connection_2d(surface, x)
    dw = fd.gradient(lambda p: spin_connection_2d(surface, p), x, h)  # dw[axis, a]
    return float(s * dw[1, 0] - s * dw[0, 1] - w[0] ** 2 - w[1] ** 2)
