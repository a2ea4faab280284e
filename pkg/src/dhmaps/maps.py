"""Smooth maps into chart or embedded targets, tension fields and hypersurface data.

Embedded space-form targets are handled in ambient coordinates: the map
returns points on the quadric and derivatives are ambient central
differences followed by tangent projection.  Chart targets return chart
coordinates; maps into projective space may pick an affine chart per
evaluation point (``chart_key``), which is then held fixed over every
finite-difference stencil centred there.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fd
from .geometry import RiemannianModel, christoffels
from .spinors import Domain

QUADRIC_TOL = 1e-10
CONSTRAINT_TOL = 1e-12


class ImmersionError(ValueError):
    pass


@dataclass(frozen=True)
class SmoothMap:
    """``fn(x)`` gives ambient coordinates (embedded targets) or chart coordinates.

    If ``chart_key`` is set, ``fn`` (and ``jacobian``) take a second argument
    ``key = chart_key(centre)``.  ``jacobian`` optionally returns the exact
    coordinate partials, shape ``(dim M, coord dim)``.
    """

    domain: Domain
    target: RiemannianModel
    fn: Callable = field(repr=False)
    name: str = "phi"
    chart_key: Optional[Callable] = field(default=None, repr=False)
    jacobian: Optional[Callable] = field(default=None, repr=False)

    @property
    def embedded(self):
        return self.target.embedded

    @property
    def coord_dim(self):
        return self.target.ambient.dim if self.embedded else self.target.dim

    def key_at(self, x):
        return None if self.chart_key is None else self.chart_key(np.asarray(x, dtype=float))

    def coords(self, p, key=None):
        p = np.asarray(p, dtype=float)
        out = self.fn(p) if self.chart_key is None else self.fn(p, key)
        return np.asarray(out, dtype=float)

    def local(self, x):
        """Coordinate function valid on a neighbourhood of x."""
        key = self.key_at(x)
        return lambda p: self.coords(p, key)

    def __call__(self, x):
        x = self.domain.check(x)
        return self.local(x)(x)

    def quadric_defect(self, points):
        if not self.embedded:
            return 0.0
        return max(self.target.ambient.constraint_defect(self(p)) for p in points)

    def check_image(self, points, tol=QUADRIC_TOL):
        d = self.quadric_defect(points)
        if d > tol:
            raise ImmersionError(f"{self.name}: image leaves the target quadric (defect {d:.3e})")
        return d


def differential(phi, x, h=fd.DEFAULT_STEP, key=None):
    """Coordinate partials ``d_a phi``, shape ``(dim M, coord dim)``.

    ``key`` selects the chart (default: the chart chosen at x).
    """
    x = phi.domain.check(x)
    if key is None:
        key = phi.key_at(x)
    if phi.jacobian is not None:
        jac = phi.jacobian(x) if phi.chart_key is None else phi.jacobian(x, key)
        return np.asarray(jac, dtype=float)
    return fd.gradient(lambda p: phi.coords(p, key), x, h)


def frame_differential(phi, x, h=fd.DEFAULT_STEP, key=None):
    """``dphi(e_a)`` for the orthonormal domain frame ``e_a = exp(-u) d_a``."""
    return phi.domain.frame_scale(x) * differential(phi, x, h, key)


def target_metric(phi, x):
    """Bilinear form for target vectors at phi(x) in the map's coordinates."""
    if phi.embedded:
        return np.diag(phi.target.ambient.signature)
    return phi.target.metric_at(phi(x))


def vector_norm(phi, x, v):
    g = target_metric(phi, x)
    v = np.asarray(v)
    return float(np.sqrt(max(np.real(np.vdot(v, g @ v)), 0.0)))


def pullback_metric(phi, x, h=fd.DEFAULT_STEP):
    """``phi^* g`` in domain coordinates."""
    d = differential(phi, x, h)
    return d @ target_metric(phi, x) @ d.T


def tension_field(phi, x, h=fd.DEFAULT_STEP):
    """``trace nabla dphi`` at x, as a vector in the map's coordinates.

    Flat domains and conformal surfaces only (there the Laplacian is
    ``exp(-2u)`` times the coordinate Laplacian).
    """
    x = phi.domain.check(x)
    f = phi.local(x)
    lap = sum(fd.second_partial(f, x, a, h) for a in range(phi.domain.dim))
    scale = phi.domain.frame_scale(x) ** 2
    if phi.embedded:
        return scale * phi.target.ambient.project(f(x), lap)
    y = f(x)
    d = differential(phi, x, h)
    gam = christoffels(phi.target, y, h)
    return scale * (lap + np.einsum("kij,ai,aj->k", gam, d, d))


def tension_norm(phi, x, h=fd.DEFAULT_STEP):
    return vector_norm(phi, x, tension_field(phi, x, h))


def conformality_defect(r, mu, tol=CONSTRAINT_TOL):
    """``sum r_j mu_j^2``; zero iff the torus-type map into projective space is conformal."""
    r = np.asarray(r, dtype=float)
    mu = np.asarray(mu, dtype=complex)
    check_torus_parameters(r, mu, tol)
    return complex(np.sum(r * mu**2))


def harmonicity_defect(r, mu, tol=CONSTRAINT_TOL):
    """``sum r_j^2 mu_j``; the torus-type map is harmonic iff this vanishes.

    For the lift ``f = sum r_j exp(mu_j z - conj(mu_j z)) e_j`` one finds
    ``D_zbar D_z f = A (conj(mu_j) - conj(A)) f_j`` with ``A = sum r_j^2 mu_j``,
    so the tension vanishes exactly when ``A = 0``.
    """
    r = np.asarray(r, dtype=float)
    mu = np.asarray(mu, dtype=complex)
    check_torus_parameters(r, mu, tol)
    return complex(np.sum(r**2 * mu))


def check_torus_parameters(r, mu, tol=CONSTRAINT_TOL):
    r = np.asarray(r, dtype=float)
    mu = np.asarray(mu, dtype=complex)
    if r.shape != mu.shape or r.ndim != 1 or r.size < 2:
        raise ValueError("r and mu must be 1-d arrays of equal length >= 2")
    if np.any(r <= 0):
        raise ValueError("r_j > 0 violated")
    if np.max(np.abs(np.abs(mu) - 1.0)) > tol:
        raise ValueError("|mu_j| = 1 violated")
    s = abs(float(np.sum(r**2)) - 1.0)
    if s > tol:
        raise ValueError(f"sum r_j^2 = 1 violated (defect {s:.3e})")
    m = abs(complex(np.sum(r * mu)))
    if m > tol:
        raise ValueError(f"sum r_j mu_j = 0 violated (defect {m:.3e})")


# -- hypersurfaces ---------------------------------------------------------------

@dataclass(frozen=True)
class HypersurfaceData:
    """Extrinsic data at one point, w.r.t. the domain frame (optionally rotated).

    ``shape`` is ``G^-1 b`` with ``b[a, b] = <A e_a, e_b>`` and G the frame
    Gram matrix (so ``shape = b`` in an orthonormal frame).  ``directions[:, k]``
    holds the frame coefficients of the k-th principal direction.
    """

    normal: np.ndarray
    tangents: np.ndarray
    shape: np.ndarray
    curvatures: np.ndarray
    directions: np.ndarray
    mean_curvature: np.ndarray

    @property
    def mean_scalar(self):
        return float(np.trace(self.shape) / self.shape.shape[0])


def _raw_normal(phi, key, x, h):
    amb = phi.target.ambient
    y = phi.coords(x, key)
    d = frame_differential(phi, x, h, key)
    sv = np.linalg.svd(d, compute_uv=False)
    if sv.min() < 1e-8 * max(1.0, sv.max()):
        raise ImmersionError(f"{phi.name}: rank-deficient differential at {x}")
    rows = [d * amb.signature]
    if amb.constrained:
        rows.append((amb.signature * y)[None, :])
    m = np.vstack(rows)
    _, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > 1e-10 * s.max()))
    null = vt[rank:]
    if null.shape[0] != 1:
        raise ImmersionError(f"{phi.name}: ambiguous normal at {x} (codimension is not 1)")
    nu = null[0]
    nrm2 = float(amb.q(nu, nu))
    if nrm2 <= 0:
        raise ImmersionError(f"{phi.name}: normal is not spacelike at {x}")
    return nu / np.sqrt(nrm2), d


def shape_data(phi, x, h=fd.DEFAULT_STEP, normal=None, rotation=None):
    """Unit normal, shape operator, principal curvatures and mean curvature vector.

    ``normal`` (callable of the domain point) pins the orientation.  Without it
    the normal is oriented so that ``trace A >= 0``; if the trace vanishes the
    last nonzero ambient component is made positive.  ``rotation`` rotates the
    domain frame: ``e'_a = sum_b rotation[a, b] e_b``.
    """
    if not phi.embedded:
        raise ImmersionError("shape data needs an embedded space-form target")
    x = phi.domain.check(x)
    key = phi.key_at(x)
    amb = phi.target.ambient
    nu, d = _raw_normal(phi, key, x, h)
    if normal is not None:
        pinned = np.asarray(normal(x), dtype=float)
        if abs(abs(float(amb.q(pinned, nu))) - 1.0) > 1e-6:
            raise ImmersionError(f"{phi.name}: supplied normal is not the unit normal at {x}")
        nu = pinned

    def nu_near(p):
        v, _ = _raw_normal(phi, key, p, h)
        return v if amb.q(v, nu) > 0 else -v

    dnu = phi.domain.frame_scale(x) * fd.gradient(nu_near, x, h)
    b = -np.array([[float(amb.q(dnu[a], d[c])) for c in range(len(d))] for a in range(len(d))])
    gram = np.array([[float(amb.q(u, v)) for v in d] for u in d])
    if rotation is not None:
        rot = np.asarray(rotation, dtype=float)
        b = rot @ b @ rot.T
        gram = rot @ gram @ rot.T
        d = rot @ d
    # A as an operator on T_xM; symmetric in an orthonormal frame
    chol = np.linalg.cholesky(0.5 * (gram + gram.T))
    linv = np.linalg.inv(chol)
    sym = linv @ (0.5 * (b + b.T)) @ linv.T
    vals, vecs = np.linalg.eigh(sym)
    dirs = linv.T @ vecs
    shape = np.linalg.solve(gram, 0.5 * (b + b.T))
    if normal is None:
        tr = float(np.trace(shape))
        flip = tr < -1e-9 or (abs(tr) <= 1e-9 and nu[np.flatnonzero(np.abs(nu) > 1e-12)[-1]] < 0)
        if flip:
            nu, b, shape, vals = -nu, -b, -shape, -vals[::-1]
            dirs = dirs[:, ::-1]
    n = len(d)
    H = (np.trace(shape) / n) * nu
    return HypersurfaceData(nu, d, shape, vals, dirs, H)


def second_fundamental_form(phi, x, nu, h=fd.DEFAULT_STEP):
    """``q(nabla^2 phi(e_a, e_b), nu)`` from second differences of the ambient map."""
    x = phi.domain.check(x)
    f = phi.local(x)
    amb = phi.target.ambient
    n = phi.domain.dim
    s2 = phi.domain.frame_scale(x) ** 2
    out = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            dd = fd.second_partial(f, x, a, h) if a == b else fd.mixed_partial(f, x, a, b, h)
            out[a, b] = s2 * float(amb.q(dd, nu))
    return out


def weingarten_asymmetry(data):
    b = data.shape
    return float(np.abs(b - b.T).max())
