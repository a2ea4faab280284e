"""Twisted spinor fields along maps and the Dirac-harmonic system.

A twisted field psi in Sigma M (x) phi^-1 TN is stored as an array of shape
``(N, D)``: spinor index first, then the map's coordinate index (ambient
coordinates for embedded targets, chart coordinates otherwise).  For
embedded targets every column combination is tangent to the quadric.

The coupled equations are ``tau(phi) = R(phi, psi)`` and ``Dirac_phi psi = 0``
with the curvature term

    R(phi, psi) = 1/2 R^i_{jkl} <psi^k, grad phi^j . psi^l> d_i

evaluated in an arbitrary frame of ``T_{phi(x)} N``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fd
from .clifford import CliffordRep
from .geometry import christoffels, constant_curvature_riemann, riemann_numeric
from .maps import (
    ImmersionError,
    SmoothMap,
    frame_differential,
    shape_data,
    target_metric,
    tension_field,
    vector_norm,
)
from .spinors import SpinorField, covariant_derivatives, dirac, max_twistor_residual

FD_TOL = 5e-4
ANALYTIC_TOL = 1e-10
ALGEBRAIC_TOL = 1e-12
REALNESS_TOL = 1e-12


# -- fields ----------------------------------------------------------------------

@dataclass(frozen=True)
class Structure:
    """Intrinsic data a twisted field was assembled from.

    ``Psi`` is paired with the first ``k`` (rotated) frame directions, ``Phi``
    with the remaining ones and ``chi`` with the unit normal.
    """

    Psi: SpinorField
    k: int
    Phi: Optional[SpinorField] = None
    chi: Optional[SpinorField] = None
    normal: Optional[Callable] = field(default=None, repr=False)
    rotation: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass(frozen=True)
class TwistedSpinorField:
    phi: SmoothMap
    value: Callable = field(repr=False)  # value(p, key) -> (N, D)
    rep: CliffordRep = field(repr=False)
    name: str = "psi"
    structure: Optional[Structure] = None

    def local(self, x):
        key = self.phi.key_at(x)
        return lambda p: np.asarray(self.value(np.asarray(p, dtype=float), key), dtype=complex)

    def __call__(self, x):
        x = self.phi.domain.check(x)
        return self.local(x)(x)

    def tangency_defect(self, x):
        """``max |q(psi_s, phi(x))|``; zero for fields tangent to the quadric."""
        if not self.phi.embedded or not self.phi.target.ambient.constrained:
            return 0.0
        amb = self.phi.target.ambient
        return float(np.abs(self(x) @ (amb.signature * self.phi(x))).max())


def twisted_field(phi, fn, rep, name="psi"):
    """Wrap ``fn(p) -> (N, D)``; embedded fields are projected onto the tangent space."""

    def value(p, key):
        out = np.asarray(fn(p), dtype=complex)
        if phi.embedded:
            out = phi.target.ambient.project(phi.coords(p, key), out)
        return out

    return TwistedSpinorField(phi, value, rep, name)


def _rotated_generators(rep, rotation):
    gens = np.asarray(rep.generators)
    if rotation is None:
        return gens
    return np.einsum("ab,bst->ast", rotation, gens)


def _check_rotation(rotation, n):
    if rotation is None:
        return None
    rot = np.asarray(rotation, dtype=float)
    if rot.shape != (n, n) or np.abs(rot @ rot.T - np.eye(n)).max() > 1e-10:
        raise ValueError("frame rotation must be an orthogonal matrix")
    return rot


def _assemble(phi, structure, h, name):
    rep = structure.Psi.rep
    n = phi.domain.dim
    k = structure.k
    rot = structure.rotation
    gens = _rotated_generators(rep, rot)

    def value(p, key):
        t = frame_differential(phi, p, h, key)
        if rot is not None:
            t = rot @ t
        Psi = structure.Psi(p)
        Phi = structure.Phi(p) if structure.Phi is not None else np.zeros_like(Psi)
        coeffs = np.array([gens[a] @ (Psi if a < k else Phi) for a in range(n)])
        out = np.einsum("as,ai->si", coeffs, t)
        if structure.chi is not None:
            out = out + np.outer(structure.chi(p), structure.normal(p))
        return out

    return TwistedSpinorField(phi, value, rep, name, structure)


def _default_normal(phi, h):
    if not phi.embedded:
        raise ImmersionError("a normal field needs an embedded target")
    return lambda p: shape_data(phi, p, h).normal


def assemble_psi_tangent(phi, Psi, rotation=None, h=fd.DEFAULT_STEP):
    """``sum_a e_a . Psi (x) phi_*(e_a)`` over an orthonormal frame of a surface."""
    if phi.domain.dim != 2:
        raise ValueError("the tangent construction is defined for surfaces (dim M = 2)")
    rot = _check_rotation(rotation, 2)
    return _assemble(phi, Structure(Psi, 2, rotation=rot), h, "psi_tangent")


def assemble_psi_hypersurface(phi, Psi, Phi, normal=None, rotation=None, h=fd.DEFAULT_STEP):
    """``sum_a e_a . Psi (x) phi_*(e_a) + Phi (x) nu`` for a hypersurface."""
    if not phi.embedded or phi.target.dim != phi.domain.dim + 1:
        raise ImmersionError("hypersurface construction needs codimension 1 in a space form")
    normal = normal or _default_normal(phi, h)
    rot = _check_rotation(rotation, phi.domain.dim)
    n = phi.domain.dim
    return _assemble(phi, Structure(Psi, n, None, Phi, normal, rot), h, "psi_hypersurface")


def scaled_field(field_, factor, name=None):
    """``factor * field`` keeping analytic derivatives."""
    grad = None if field_.grad is None else (lambda x: factor * np.asarray(field_.grad(x)))
    return SpinorField(
        field_.domain, lambda x: factor * np.asarray(field_.value(x)), grad, field_.rep,
        name or f"{factor:g}*{field_.name}",
    )


def assemble_psi_two_curvatures(phi, Psi, Phi, chi, k, normal=None, rotation=None, h=fd.DEFAULT_STEP):
    """``sum_{a<=k} e_a.Psi (x) phi_* e_a + sum_{a>k} e_a.Phi (x) phi_* e_a + chi (x) nu``."""
    n = phi.domain.dim
    if not 1 <= k <= n:
        raise ValueError(f"multiplicity k must be in [1, {n}]")
    if not phi.embedded or phi.target.dim != n + 1:
        raise ImmersionError("two-curvature construction needs codimension 1 in a space form")
    normal = normal or _default_normal(phi, h)
    rot = _check_rotation(rotation, n)
    return _assemble(phi, Structure(Psi, k, Phi, chi, normal, rot), h, "psi_two_curvatures")


def assemble_psi_bicurved(phi, Psi, chi, lam, mu, normal=None, rotation=None, h=fd.DEFAULT_STEP):
    """``e_1.Psi (x) phi_* e_1 - (mu/lam) e_2.Psi (x) phi_* e_2 + chi (x) nu`` on a surface."""
    if phi.domain.dim != 2:
        raise ValueError("the two-curvature surface construction needs dim M = 2")
    if lam == 0:
        raise ValueError("principal curvature lambda must be nonzero")
    if lam == mu:
        raise ValueError("principal curvatures must differ")
    Phi = scaled_field(Psi, -mu / lam, name="Phi")
    return assemble_psi_two_curvatures(phi, Psi, Phi, chi, 1, normal, rotation, h)


# -- target frames and the curvature term -------------------------------------

def target_frame(phi, x, basis=None, rng=None):
    """Rows spanning ``T_{phi(x)} N`` in map coordinates, and their Gram matrix.

    Default: an orthonormal ambient frame (embedded) or the coordinate frame
    (chart).  ``rng`` draws a random frame instead.
    """
    G = target_metric(phi, x)
    if basis is None:
        if phi.embedded:
            basis = phi.target.ambient.tangent_frame(phi(x), rng)
        elif rng is None:
            basis = np.eye(phi.target.dim)
        else:
            basis = rng.normal(size=(phi.target.dim, phi.target.dim))
    basis = np.asarray(basis, dtype=float)
    return basis, basis @ G @ basis.T


def frame_components(phi, x, basis, gram, v):
    """Components of target vectors ``v[..., D]`` w.r.t. ``basis``."""
    G = target_metric(phi, x)
    return np.linalg.solve(gram, (np.asarray(v) @ G @ basis.T).T).T


def frame_riemann(phi, x, basis, gram, h=fd.DEFAULT_STEP):
    """Target curvature tensor ``R^a_{bcd}`` in the given frame."""
    model = phi.target
    if model.curvature is not None:
        return constant_curvature_riemann(model.curvature, gram)
    if phi.embedded:
        raise ValueError("numeric curvature is only available for chart targets")
    riem = riemann_numeric(model, phi(x), h)
    inv = np.linalg.inv(basis)
    return np.einsum("ia,ijkl,bj,ck,dl->abcd", inv, riem, basis, basis, basis)


def curvature_kernel(riem, dphi, comps, gens):
    """``1/2 R^i_{jkl} <psi^k, grad phi^j . psi^l>`` (complex, batched over leading axes).

    riem: ``(..., K, K, K, K)``; dphi: ``(..., n, K)`` frame components of
    ``dphi(e_a)``; comps: ``(..., K, N)`` spinor components; gens: ``(n, N, N)``.
    """
    v = np.einsum("...aj,ast->...jst", dphi, gens)
    w = np.einsum("...jst,...lt->...jls", v, comps)
    pair = np.einsum("...ks,...jls->...kjl", comps.conj(), w)
    return 0.5 * np.einsum("...ijkl,...kjl->...i", riem, pair)


def curvature_term_components(psi, x, h=fd.DEFAULT_STEP, basis=None, rng=None):
    """Complex frame components of ``R(phi, psi)`` and the frame used."""
    phi = psi.phi
    x = phi.domain.check(x)
    basis, gram = target_frame(phi, x, basis, rng)
    dphi = frame_components(phi, x, basis, gram, frame_differential(phi, x, h))
    comps = frame_components(phi, x, basis, gram, psi(x)).T
    riem = frame_riemann(phi, x, basis, gram, h)
    gens = np.asarray(psi.rep.generators)
    return curvature_kernel(riem, dphi, comps, gens), basis


def curvature_term(psi, x, h=fd.DEFAULT_STEP, basis=None, rng=None):
    """``R(phi, psi)`` at x as a real vector in map coordinates."""
    comps, basis = curvature_term_components(psi, x, h, basis, rng)
    scale = max(1.0, float(np.abs(comps).max()))
    if np.abs(comps.imag).max() > 1e-8 * scale:
        raise ValueError("curvature term is not real; the frame data is inconsistent")
    return comps.real @ basis


def two_curvature_split(c, n, k, Psi, Phi, chi, gens):
    """Closed-form split of the curvature term for the two-curvature construction.

    In a principal frame ``e_a`` (Psi on ``a < k``, Phi on ``a >= k``) of a
    hypersurface in a space of constant curvature c:

        R^T = c [ (n-k) Re<e_i.Phi, Psi> e_i - k Re<e_r.Phi, Psi> e_r ]
        R^N = -c Re<chi, k Psi + (n-k) Phi> nu

    Returns the tangent coefficients (length n) and the normal coefficient.
    """
    proj = np.real(np.einsum("as,s->a", np.einsum("ast,t->as", gens, Phi).conj(), Psi))
    weights = np.where(np.arange(n) < k, n - k, -k)
    tangent = c * weights * proj
    normal = -c * float(np.real(np.vdot(chi, k * Psi + (n - k) * Phi)))
    return tangent, normal


def curvature_term_splits(psi, x, h=fd.DEFAULT_STEP):
    """Tangent and normal parts of ``R(phi, psi)`` from the closed form.

    Needs a field assembled by one of the hypersurface constructors and a
    constant-curvature target.
    """
    s = psi.structure
    phi = psi.phi
    if s is None:
        raise ValueError("closed-form split needs a field built from intrinsic spinors")
    if phi.target.curvature is None or not phi.embedded:
        raise ValueError("closed-form split needs an embedded constant-curvature target")
    x = phi.domain.check(x)
    n = phi.domain.dim
    gens = _rotated_generators(psi.rep, s.rotation)
    Psi = s.Psi(x)
    Phi = s.Phi(x) if s.Phi is not None else np.zeros_like(Psi)
    chi = s.chi(x) if s.chi is not None else np.zeros_like(Psi)
    tan, nor = two_curvature_split(phi.target.curvature, n, s.k, Psi, Phi, chi, gens)
    t = frame_differential(phi, x, h)
    if s.rotation is not None:
        t = s.rotation @ t
    nu = s.normal(x) if s.normal is not None else np.zeros(phi.coord_dim)
    return tan @ t, nor * nu


# -- the Dirac operator along the map ------------------------------------------

def twisted_covariant_derivatives(psi, x, h=fd.DEFAULT_STEP):
    """``tilde-nabla_{e_a} psi`` at x, shape ``(n, N, D)``."""
    phi = psi.phi
    dom = phi.domain
    x = dom.check(x)
    f = psi.local(x)
    val = f(x)
    cov = dom.frame_scale(x) * fd.gradient(f, x, h)
    if phi.embedded:
        P = phi.target.ambient.projector(phi(x))
        cov = cov @ P.T
    else:
        gam = christoffels(phi.target, phi(x), h)
        dphi = frame_differential(phi, x, h)
        cov = cov + np.einsum("kij,ai,sj->ask", gam, dphi, val)
    if dom.surface is not None:
        g = psi.rep.generators
        w = dom.connection(x)
        cov = cov + 0.5 * w[:, None, None] * (g[0] @ g[1] @ val)[None]
    return cov


def twisted_dirac(psi, x, h=fd.DEFAULT_STEP):
    """``sum_a e_a . tilde-nabla_{e_a} psi`` at x, shape ``(N, D)``."""
    cov = twisted_covariant_derivatives(psi, x, h)
    return np.einsum("ast,atk->sk", np.asarray(psi.rep.generators), cov)


def twisted_norm(phi, x, v):
    """Norm on the twisted fiber: ``sqrt(sum_s <v_s, v_s>_N)``."""
    G = target_metric(phi, x)
    v = np.asarray(v)
    return float(np.sqrt(max(np.real(np.einsum("si,ij,sj->", v.conj(), G, v)), 0.0)))


def hypersurface_expansion(psi, x, normal=None, h=fd.DEFAULT_STEP, complete=True):
    """Dirac operator along a hypersurface via the adapted frame ``{phi_* e_a, nu}``.

    ``Dirac psi = Dirac(psi^i) eps_i - A_ab e_a.psi^nu (x) eps_b + A_ab e_a.psi^b (x) nu``
    on a flat domain (the normal connection of a hypersurface vanishes).
    ``complete=False`` drops the last term, which comes from the second
    fundamental form acting on the tangent frame.
    """
    phi = psi.phi
    if phi.domain.surface is not None:
        raise ValueError("the adapted-frame expansion is implemented for flat domains")
    if not phi.embedded or phi.target.dim != phi.domain.dim + 1:
        raise ImmersionError("expansion needs a hypersurface in a space form")
    x = phi.domain.check(x)
    amb = phi.target.ambient
    key = phi.key_at(x)
    if normal is None:
        normal = psi.structure.normal if psi.structure and psi.structure.normal else None
    data = shape_data(phi, x, h, normal=normal)
    nu0 = data.normal

    def frame_at(p):
        t = frame_differential(phi, p, h, key)
        if normal is not None:
            nu = np.asarray(normal(p), dtype=float)
        else:
            nu = shape_data(phi, p, h).normal
            nu = nu if amb.q(nu, nu0) > 0 else -nu
        return np.vstack([t, nu])

    def comps(p):
        fr = frame_at(p)
        gram = np.array([[float(amb.q(u, v)) for v in fr] for u in fr])
        raw = np.asarray(psi.local(x)(p)) @ np.diag(amb.signature) @ fr.T
        return np.linalg.solve(gram, raw.T)  # (n+1, N)

    gens = np.asarray(psi.rep.generators)
    n = phi.domain.dim
    dcomp = fd.gradient(comps, x, h)  # (n, n+1, N)
    dirac_comps = np.einsum("ast,ait->is", gens, dcomp)
    c0 = comps(x)
    A = data.shape
    fr = frame_at(x)
    out = dirac_comps.T @ fr
    normal_spinor = c0[n]
    out -= np.einsum("ab,ast,t->sb", A, gens, normal_spinor) @ fr[:n]
    if complete:
        out += np.outer(np.einsum("ab,ast,bt->s", A, gens, c0[:n]), fr[n])
    return out


# -- residual reports ---------------------------------------------------------------

@dataclass(frozen=True)
class Residual:
    max: float
    mean: float
    tol: Optional[float] = None

    @property
    def passed(self):
        return None if self.tol is None else bool(self.max <= self.tol)

    @classmethod
    def from_samples(cls, values, tol=None):
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError("no samples")
        return cls(float(values.max()), float(values.mean()), tol)

    def to_dict(self):
        return {"max": self.max, "mean": self.mean, "tol": self.tol, "pass": self.passed}


@dataclass
class ResidualReport:
    """Named residuals (max/mean over a grid) and criterion flags.

    Residuals without a tolerance are diagnostics and do not gate ``passed``.
    """

    residuals: dict = field(default_factory=dict)
    criteria: dict = field(default_factory=dict)
    grid: Optional[tuple] = None
    fd_step: Optional[float] = None

    @property
    def passed(self):
        return all(r.passed for r in self.residuals.values() if r.tol is not None)

    def merge(self, other):
        self.residuals.update(other.residuals)
        self.criteria.update(other.criteria)
        return self

    def to_dict(self):
        return {
            "residuals": {k: v.to_dict() for k, v in self.residuals.items()},
            "criteria": dict(self.criteria),
        }


def _tol(tolerances, name, default):
    return (tolerances or {}).get(name, default)


def _points(points):
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError("empty grid")
    return points


def el_residuals(psi, points, h=fd.DEFAULT_STEP, tolerances=None, normal=None):
    """Residuals of ``tau = R(phi, psi)`` and ``Dirac psi = 0`` on the grid.

    For hypersurfaces the tangent/normal splits of both equations are added
    (``R^T = 0``, ``R^N = n H``, ``Dirac^T psi = 0``, ``Dirac^N psi = 0``).
    """
    points = _points(points)
    phi = psi.phi
    n = phi.domain.dim
    if normal is None and psi.structure is not None:
        normal = psi.structure.normal
    hyper = phi.embedded and phi.target.dim == n + 1 and normal is not None
    names = ["el_map", "el_spinor", "tension"]
    if hyper:
        names += ["r_tangent", "r_normal", "dirac_tangent", "dirac_normal"]
    vals = {k: [] for k in names}
    for x in points:
        tau = tension_field(phi, x, h)
        R = curvature_term(psi, x, h)
        D = twisted_dirac(psi, x, h)
        vals["el_map"].append(vector_norm(phi, x, tau - R))
        vals["el_spinor"].append(twisted_norm(phi, x, D))
        vals["tension"].append(vector_norm(phi, x, tau))
        if hyper:
            amb = phi.target.ambient
            data = shape_data(phi, x, h, normal=normal)
            nu = data.normal
            RN = float(amb.q(R, nu)) * nu
            DN = np.outer(D @ (amb.signature * nu), nu)
            vals["r_tangent"].append(vector_norm(phi, x, R - RN))
            vals["r_normal"].append(vector_norm(phi, x, RN - n * data.mean_curvature))
            vals["dirac_tangent"].append(twisted_norm(phi, x, D - DN))
            vals["dirac_normal"].append(twisted_norm(phi, x, DN))
    report = ResidualReport(fd_step=h)
    for k in names:
        tol = None if k == "tension" else _tol(tolerances, k, FD_TOL)
        report.residuals[k] = Residual.from_samples(vals[k], tol)
    report.criteria["dirac_harmonic"] = report.passed
    return report


# -- criteria of the constructions --------------------------------------------------

def _mode_tol(analytic):
    return ANALYTIC_TOL if analytic else FD_TOL


def _field(Psi, analytic):
    return Psi if analytic else Psi.without_gradient()


def frame_difference(Psi, x, h=fd.DEFAULT_STEP):
    """``e_1 . nabla_1 Psi - e_2 . nabla_2 Psi`` on a surface."""
    nab = covariant_derivatives(Psi, x, h)
    g = Psi.rep.generators
    return g[0] @ nab[0] - g[1] @ nab[1]


def two_curvature_criteria(phi, Psi, chi, lam, mu, points, h=fd.DEFAULT_STEP, normal=None,
                       analytic=True, tolerances=None, balance_points=None):
    """Criteria for the two-curvature surface construction in a space of constant curvature.

    (i) chi harmonic; (ii) ``c (mu/lam - 1) Re<chi, Psi> = <H, nu>``;
    (iii) ``e_1.nabla_1 Psi - e_2.nabla_2 Psi = lam chi``.
    """
    points = _points(points)
    c = phi.target.curvature
    if c is None:
        raise ValueError("needs a constant-curvature target")
    Psi_m = _field(Psi, analytic)
    chi_m = _field(chi, analytic)
    harmonic = [np.linalg.norm(dirac(chi_m, x, h)) for x in points]
    bal_pts = points if balance_points is None else _points(balance_points)
    balance = []
    for x in bal_pts:
        data = shape_data(phi, x, h, normal=normal)
        lhs = c * (mu / lam - 1.0) * np.real(np.vdot(chi(x), Psi(x)))
        balance.append(abs(lhs - data.mean_scalar))
    frame_eq = [np.linalg.norm(frame_difference(Psi_m, x, h) - lam * chi(x)) for x in points]
    rep = ResidualReport(fd_step=h)
    rep.residuals["crit_i_chi_harmonic"] = Residual.from_samples(
        harmonic, _tol(tolerances, "crit_i_chi_harmonic", ALGEBRAIC_TOL if analytic else FD_TOL))
    rep.residuals["crit_ii_balance"] = Residual.from_samples(
        balance, _tol(tolerances, "crit_ii_balance", 1e-6))
    rep.residuals["crit_iii_frame"] = Residual.from_samples(
        frame_eq, _tol(tolerances, "crit_iii_frame", _mode_tol(analytic)))
    for k, r in rep.residuals.items():
        rep.criteria[k] = r.passed
    return rep


def principal_frame_residuals(phi, Psi, Phi, points, h=fd.DEFAULT_STEP, normal=None):
    """``max_b |2 e_b.nabla_b Psi - Dirac Psi - lam_b Phi|`` in the domain frame (assumed principal)."""
    out = []
    g = Psi.rep.generators
    for x in _points(points):
        data = shape_data(phi, x, h, normal=normal)
        nab = covariant_derivatives(Psi, x, h)
        d = sum(gb @ v for gb, v in zip(g, nab))
        out.append(max(
            np.linalg.norm(2 * g[b] @ nab[b] - d - data.shape[b, b] * Phi(x)) for b in range(len(g))
        ))
    return out


def hypersurface_criteria(phi, Psi, Phi, points, h=fd.DEFAULT_STEP, normal=None, analytic=True,
                      tolerances=None):
    """Hypotheses of the hypersurface construction with normal spinor Phi.

    Always: Phi harmonic and ``-2c Re<Phi, Psi> nu = H``.  For n = 2 also
    minimality and ``e_1.nabla_1 Psi - e_2.nabla_2 Psi = lam_1 Phi``; for
    n >= 3 umbilicity, the twistor equation and
    ``Dirac Psi = -n <H, nu> Phi / (n - 2)``.
    """
    points = _points(points)
    c = phi.target.curvature
    n = phi.domain.dim
    Psi_m = _field(Psi, analytic)
    Phi_m = _field(Phi, analytic)
    tol = _mode_tol(analytic)
    vals = {"phi_harmonic": [], "normal_balance": [], "principal_frame": []}
    if n == 2:
        vals.update(minimal=[], frame_equation=[])
    else:
        vals.update(umbilical=[], twistor=[], dirac_equation=[])
    for x in points:
        data = shape_data(phi, x, h, normal=normal)
        hnu = data.mean_scalar
        vals["phi_harmonic"].append(np.linalg.norm(dirac(Phi_m, x, h)))
        vals["normal_balance"].append(abs(-2 * c * np.real(np.vdot(Phi(x), Psi(x))) - hnu))
        if n == 2:
            vals["minimal"].append(abs(hnu))
            lam1 = data.shape[0, 0]
            vals["frame_equation"].append(np.linalg.norm(frame_difference(Psi_m, x, h) - lam1 * Phi(x)))
        else:
            vals["umbilical"].append(float(np.ptp(data.curvatures)))
            vals["twistor"].append(max_twistor_residual(Psi_m, [x], h))
            vals["dirac_equation"].append(np.linalg.norm(dirac(Psi_m, x, h) + n * hnu / (n - 2) * Phi(x)))
    vals["principal_frame"] = principal_frame_residuals(phi, Psi_m, Phi, points, h, normal)
    defaults = {"phi_harmonic": tol, "normal_balance": 1e-6, "minimal": 1e-6, "umbilical": 1e-6,
                "twistor": tol, "dirac_equation": tol, "frame_equation": tol, "principal_frame": max(tol, 1e-6)}
    rep = ResidualReport(fd_step=h)
    for k, v in vals.items():
        rep.residuals[k] = Residual.from_samples(v, _tol(tolerances, k, defaults[k]))
        rep.criteria[k] = rep.residuals[k].passed
    return rep


def tangent_criteria(phi, Psi, points, h=fd.DEFAULT_STEP, analytic=True, tolerances=None):
    """Harmonic map plus twistor spinor on a surface."""
    points = _points(points)
    Psi_m = _field(Psi, analytic)
    rep = ResidualReport(fd_step=h)
    rep.residuals["harmonic_map"] = Residual.from_samples(
        [vector_norm(phi, x, tension_field(phi, x, h)) for x in points],
        _tol(tolerances, "harmonic_map", FD_TOL))
    rep.residuals["twistor"] = Residual.from_samples(
        [max_twistor_residual(Psi_m, [x], h) for x in points],
        _tol(tolerances, "twistor", _mode_tol(analytic)))
    for k, r in rep.residuals.items():
        rep.criteria[k] = r.passed
    return rep


def criteria_report(case, points, h=fd.DEFAULT_STEP, analytic=True, tolerances=None):
    """Evaluate the construction criteria that apply to a case package."""
    kind = case.kind
    if kind == "bicurved":
        return two_curvature_criteria(case.phi, case.Psi, case.chi, case.lam, case.mu, points, h,
                                  case.normal, analytic, tolerances)
    if kind == "hypersurface":
        return hypersurface_criteria(case.phi, case.Psi, case.Phi, points, h, case.normal, analytic,
                                 tolerances)
    if kind == "tangent":
        return tangent_criteria(case.phi, case.Psi, points, h, analytic, tolerances)
    raise ValueError(f"no criteria for case kind {kind!r}")


# -- action functional ------------------------------------------------------------

@dataclass(frozen=True)
class Action:
    energy: float
    spinor: float
    spinor_imag: float

    @property
    def total(self):
        return self.energy + self.spinor


def action_functional(psi, grid, h=fd.DEFAULT_STEP, phi=None):
    """``1/2 int (|dphi|^2 + <psi, Dirac psi>)`` by the midpoint rule.

    ``psi`` may be None (pure energy of ``phi``).
    """
    if grid.weights is None:
        raise ValueError("action needs a quadrature grid")
    phi = phi if phi is not None else psi.phi
    points = _points(grid.points)
    energy = 0.0
    spin = 0.0 + 0.0j
    for x, w in zip(points, grid.weights):
        vol = w * phi.domain.volume_factor(x)
        d = frame_differential(phi, x, h)
        G = target_metric(phi, x)
        energy += 0.5 * vol * float(np.einsum("ai,ij,aj->", d, G, d))
        if psi is not None:
            D = twisted_dirac(psi, x, h)
            spin += 0.5 * vol * np.einsum("si,ij,sj->", psi(x).conj(), G, D)
    return Action(energy, float(spin.real), float(abs(spin.imag)))
