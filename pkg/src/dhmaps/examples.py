"""Explicit constructions of (map, twisted spinor) pairs, with validation.

Every constructor checks its side conditions and returns a ``CasePackage``;
``verify`` evaluates the residuals and criteria that apply to a package.
"""

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable, Optional

import numpy as np

from . import fd
from .clifford import build_representation
from .dirac_harmonic import (
    ALGEBRAIC_TOL,
    ANALYTIC_TOL,
    FD_TOL,
    Residual,
    ResidualReport,
    assemble_psi_bicurved,
    assemble_psi_hypersurface,
    assemble_psi_tangent,
    criteria_report,
    curvature_term,
    el_residuals,
    twisted_dirac,
    twisted_norm,
)
from .geometry import ConformalSurface, fubini_study, realify, space_form
from .grids import product_grid
from .maps import (
    SmoothMap,
    conformality_defect,
    harmonicity_defect,
    check_torus_parameters,
    pullback_metric,
    shape_data,
    tension_field,
    vector_norm,
)
from .spinors import (
    SpinorField,
    conformal,
    constant_field,
    cylinder,
    dirac,
    flat,
    max_twistor_residual,
)

VALIDATION_TOL = 1e-10


class ValidationError(ValueError):
    """A constructor's side condition failed; ``condition`` names it."""

    def __init__(self, condition, message):
        super().__init__(f"{condition}: {message}")
        self.condition = condition
        self.detail = message


@dataclass(frozen=True)
class CasePackage:
    name: str
    kind: str  # "tangent", "hypersurface", "bicurved" or "intrinsic"
    phi: Optional[SmoothMap]
    psi: object
    Psi: SpinorField
    Phi: Optional[SpinorField] = None
    chi: Optional[SpinorField] = None
    normal: Optional[Callable] = field(default=None, repr=False)
    lam: Optional[float] = None
    mu: Optional[float] = None
    params: dict = field(default_factory=dict)
    grid_ranges: tuple = ()
    grid_counts: tuple = ()
    periodic: tuple = ()
    # residual name -> whether the construction claims it passes
    expected: dict = field(default_factory=dict)

    def grid(self, counts=None):
        counts = tuple(counts) if counts else self.grid_counts
        if len(counts) != len(self.grid_ranges):
            raise ValueError(f"{self.name}: grid needs {len(self.grid_ranges)} axes")
        return product_grid(self.grid_ranges, counts, self.periodic)


def _spinor(v, size, name):
    v = np.asarray(v, dtype=complex)
    if v.shape != (size,):
        raise ValidationError(name, f"spinor of length {size} expected, got shape {v.shape}")
    return v


def _zxy(x):
    return complex(x[0], x[1])


# -- torus-type harmonic maps into projective space ------------------------------

def example1(r, mu, Psi0, Psi1, h=fd.DEFAULT_STEP, name="example1"):
    """Harmonic map ``z -> [sum r_j exp(mu_j z - conj(mu_j z)) e_j]`` from (R^2, 2|dz|^2).

    Twistor spinor ``Psi(z) = Psi0 - z.Psi1 / 2`` with ``z. = x e_1. + y e_2.``.
    """
    r = np.asarray(r, dtype=float)
    mu = np.asarray(mu, dtype=complex)
    try:
        check_torus_parameters(r, mu, 1e-12)
    except ValueError as exc:
        raise ValidationError("torus parameters", str(exc)) from exc
    rep = build_representation(2)
    Psi0 = _spinor(Psi0, 2, "Psi0")
    Psi1 = _spinor(Psi1, 2, "Psi1")
    n = r.size - 1
    surface = ConformalSurface(lambda x: 0.5 * np.log(2.0), lambda x: np.zeros(2), name="2|dz|^2")
    dom = conformal(surface)
    target = fubini_study(n)
    # exponent rates d/dx and d/dy of mu z - conj(mu z) = 2i Im(mu z)
    rates = np.stack([2j * mu.imag, 2j * mu.real])

    def homogeneous(x):
        return r * np.exp(2j * np.imag(mu * _zxy(x)))

    def chart_key(x):
        return int(np.argmax(np.abs(homogeneous(x))))

    def fn(x, key):
        Z = homogeneous(x)
        return realify(np.delete(Z / Z[key], key))

    def jac(x, key):
        Z = homogeneous(x)
        w = np.delete(Z / Z[key], key)
        rel = np.delete(rates - rates[:, key : key + 1], key, axis=1)
        return realify(w[None, :] * rel)

    phi = SmoothMap(dom, target, fn, "torus map", chart_key, jac)
    g = rep.generators
    Psi = SpinorField(
        dom,
        lambda x: Psi0 - 0.5 * (x[0] * g[0] + x[1] * g[1]) @ Psi1,
        lambda x: np.array([-0.5 * g[0] @ Psi1, -0.5 * g[1] @ Psi1]),
        rep, "Psi",
    )
    psi = assemble_psi_tangent(phi, Psi, h=h)
    params = {"r": r.tolist(), "mu": [[z.real, z.imag] for z in mu],
              "Psi0": [[z.real, z.imag] for z in Psi0], "Psi1": [[z.real, z.imag] for z in Psi1]}
    return CasePackage(
        name, "tangent", phi, psi, Psi, params=params,
        grid_ranges=((-1.0, 1.0), (-1.0, 1.0)), grid_counts=(8, 8), periodic=(False, False),
        expected={"el_map": True, "el_spinor": True, "harmonic_map": True, "twistor": True},
    )


# -- the harmonic sequence of the sphere -----------------------------------------

def sequence_component(p, n, r, z):
    """``f_{p,r}(z)``; terms with vanishing binomials are skipped (no negative powers)."""
    zz = abs(z) ** 2
    total = 0.0 + 0.0j
    for k in range(0, p + 1):
        coef = comb(r, p - k) * comb(n - r, k) if p - k >= 0 else 0
        if coef == 0:
            continue
        total += (-1) ** k * coef * z ** (r - p + k) * np.conj(z) ** k
    return factorial(p) / (1 + zz) ** p * np.sqrt(comb(n, r)) * total


def sequence_metric_factor(p, n):
    return n + 2 * p * (n - p)


def example2(p, n, Psi0, Psi1, h=fd.DEFAULT_STEP):
    """Conformal minimal immersion ``S^2 -> CP^n`` of the harmonic sequence.

    Domain metric ``(n + 2p(n-p)) |dz|^2 / (1 + |z|^2)^2``; twistor spinor
    ``(Psi0 + z.Psi1) / sqrt(1 + |z|^2)``.
    """
    if not (isinstance(p, (int, np.integer)) and isinstance(n, (int, np.integer)) and 0 <= p <= n and n >= 1):
        raise ValidationError("0 <= p <= n", f"got p={p}, n={n}")
    rep = build_representation(2)
    Psi0 = _spinor(Psi0, 2, "Psi0")
    Psi1 = _spinor(Psi1, 2, "Psi1")
    factor = sequence_metric_factor(p, n)
    surface = ConformalSurface(
        lambda x: 0.5 * np.log(factor) - np.log1p(x @ x),
        lambda x: -2.0 * np.asarray(x) / (1.0 + x @ x),
        name=f"ds_{p}^2",
    )
    dom = conformal(surface)
    target = fubini_study(n)

    def homogeneous(x):
        z = _zxy(x)
        return np.array([sequence_component(p, n, j, z) for j in range(n + 1)])

    def chart_key(x):
        return int(np.argmax(np.abs(homogeneous(x))))

    def fn(x, key):
        F = homogeneous(x)
        return realify(np.delete(F / F[key], key))

    phi = SmoothMap(dom, target, fn, f"phi_{p}", chart_key)
    g = rep.generators

    def value(x):
        return (Psi0 + (x[0] * g[0] + x[1] * g[1]) @ Psi1) / np.sqrt(1.0 + x @ x)

    def grad(x):
        s = 1.0 + x @ x
        top = Psi0 + (x[0] * g[0] + x[1] * g[1]) @ Psi1
        return np.array([g[a] @ Psi1 / np.sqrt(s) - x[a] * top / s**1.5 for a in range(2)])

    Psi = SpinorField(dom, value, grad, rep, "Psi")
    psi = assemble_psi_tangent(phi, Psi, h=h)
    params = {"p": int(p), "n": int(n), "Psi0": [[z.real, z.imag] for z in Psi0],
              "Psi1": [[z.real, z.imag] for z in Psi1]}
    return CasePackage(
        "example2", "tangent", phi, psi, Psi, params=params,
        grid_ranges=((-1.0, 1.0), (-1.0, 1.0)), grid_counts=(6, 6), periodic=(False, False),
        expected={"el_map": True, "el_spinor": True, "harmonic_map": True, "twistor": True,
                  "pullback_metric": True},
    )


# -- horosphere in hyperbolic space --------------------------------------------

def horosphere(n):
    """``u -> (u, |u|^2/2, |u|^2/2 + 1)`` into ``H^{n+1}(-1)`` with normal ``N0 - x``."""
    target = space_form("hyperbolic", n + 1, 1.0)
    N0 = np.zeros(n + 2)
    N0[-2:] = 1.0

    def fn(u):
        s = 0.5 * (u @ u)
        return np.concatenate([u, [s, s + 1.0]])

    def jac(u):
        return np.hstack([np.eye(n), u[:, None], u[:, None]])

    phi = SmoothMap(flat(n), target, fn, "horosphere", jacobian=jac)
    return phi, (lambda u: N0 - fn(np.asarray(u, dtype=float)))


def example3(n, Phi, Psi0, h=fd.DEFAULT_STEP, validate=True):
    """Horosphere ``R^n -> H^{n+1}(-1)`` with ``Psi(X) = Psi0 + X.Phi / (n-2)`` and constant Phi."""
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise ValidationError("n >= 3", f"got n={n} (the construction divides by n - 2)")
    if n > 5:
        raise ValidationError("n <= 5", f"got n={n}")
    rep = build_representation(n)
    Phi = _spinor(Phi, rep.fiber_dim, "Phi")
    Psi0 = _spinor(Psi0, rep.fiber_dim, "Psi0")
    balance = float(np.real(np.vdot(Phi, Psi0)))
    if validate and abs(balance - 0.5) > 1e-12:
        raise ValidationError("Re<Phi, Psi0> = 1/2", f"got {balance!r}")
    phi, normal = horosphere(n)
    dom = phi.domain
    gens = np.asarray(rep.generators)
    Psi = SpinorField(
        dom,
        lambda X: Psi0 + np.einsum("a,ast,t->s", X, gens, Phi) / (n - 2),
        lambda X: gens @ Phi / (n - 2),
        rep, "Psi",
    )
    Phi_f = constant_field(dom, Phi, "Phi")
    psi = assemble_psi_hypersurface(phi, Psi, Phi_f, normal, h=h)
    params = {"n": int(n), "Phi": [[z.real, z.imag] for z in Phi],
              "Psi0": [[z.real, z.imag] for z in Psi0]}
    return CasePackage(
        "example3", "hypersurface", phi, psi, Psi, Phi_f, normal=normal, params=params,
        grid_ranges=((-1.0, 1.0),) * n, grid_counts=(9,) * n, periodic=(False,) * n,
        expected={"el_map": True, "el_spinor": True, "phi_harmonic": True, "twistor": True,
                  "shape_identity": True},
    )


# -- two-curvature surfaces in hyperbolic 3-space -------------------------------------

def theorem3_constants(R, r):
    s = np.hypot(R, r)
    lam = s / (r * R)
    mu = r / (R * s)
    xi = (R**2 + 2 * r**2) / (2 * R * r * s)
    rhs = s * (R**2 + 2 * r**2) / (2 * r * R)
    return {"s": s, "lam": lam, "mu": mu, "xi": xi, "c": -1.0 / R**2, "balance_rhs": rhs}


def _coeffs(values, m, name):
    values = dict(values or {})
    bad = [k for k in values if abs(int(k)) > m]
    if bad:
        raise ValidationError(f"|k| <= m for {name}", f"modes {bad} exceed m={m}")
    return {k: complex(values.get(k, 0.0)) for k in range(-m, m + 1)}


def theorem3_family(R, r, m, a, b, c, d, validate=True, name="theorem3"):
    """The surface ``S^1(r) x H^1(sqrt(R^2+r^2))`` in ``H^3(R)`` with its spinor data.

    ``c`` and ``d`` map mode numbers ``k`` in ``[-m, m]`` to complex constants
    (missing modes are zero).
    """
    if not (R > 0 and r > 0):
        raise ValidationError("R, r > 0", f"got R={R}, r={r}")
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise ValidationError("m >= 0", f"got m={m}")
    a, b = complex(a), complex(b)
    c = _coeffs(c, m, "c_k")
    d = _coeffs(d, m, "d_k")
    k_ = theorem3_constants(R, r)
    s, lam, mu = k_["s"], k_["lam"], k_["mu"]
    balance_lhs = (a * np.conj(d[0]) + np.conj(b) * c[0]).real
    balance_defect = abs(balance_lhs - k_["balance_rhs"])
    mode_defect = max([abs(a * np.conj(d[k]) + np.conj(b) * c[-k]) for k in range(-m, m + 1) if k], default=0.0)
    if validate:
        if balance_defect > VALIDATION_TOL:
            raise ValidationError(
                "Re(a conj(d_0) + conj(b) c_0) = sqrt(R^2+r^2)(R^2+2r^2)/(2rR)",
                f"left side {float(balance_lhs)!r}, required {float(k_['balance_rhs'])!r} (residual {balance_defect:.3e})",
            )
        if mode_defect > VALIDATION_TOL:
            raise ValidationError("a conj(d_k) + conj(b) c_-k = 0", f"residual {mode_defect:.3e}")
    rep = build_representation(2)
    dom = cylinder(r)
    target = space_form("hyperbolic", 3, R)

    def fn(x):
        th, t = x
        return np.array([r * np.cos(th / r), r * np.sin(th / r), s * np.sinh(t / s), s * np.cosh(t / s)])

    def jac(x):
        th, t = x
        return np.array([
            [-np.sin(th / r), np.cos(th / r), 0.0, 0.0],
            [0.0, 0.0, np.cosh(t / s), np.sinh(t / s)],
        ])

    def normal(x):
        th, t = x
        return -np.array([s / R * np.cos(th / r), s / R * np.sin(th / r),
                          r / R * np.sinh(t / s), r / R * np.cosh(t / s)])

    phi = SmoothMap(dom, target, fn, "S^1 x H^1", jacobian=jac)
    ks = np.arange(-m, m + 1)
    cv = np.array([c[k] for k in ks])
    dv = np.array([d[k] for k in ks])

    def value(x):
        th, t = x
        ef = np.exp(ks / r * (-t + 1j * th))
        eg = np.exp(ks / r * (t + 1j * th))
        return np.array([1j * lam * b * t + dv @ ef, 1j * lam * a * t + cv @ eg])

    def grad(x):
        th, t = x
        ef = dv * np.exp(ks / r * (-t + 1j * th))
        eg = cv * np.exp(ks / r * (t + 1j * th))
        return np.array([
            [np.sum(1j * ks / r * ef), np.sum(1j * ks / r * eg)],
            [1j * lam * b - np.sum(ks / r * ef), 1j * lam * a + np.sum(ks / r * eg)],
        ])

    Psi = SpinorField(dom, value, grad, rep, "Psi")
    chi = constant_field(dom, [a, b], "chi")
    psi = assemble_psi_bicurved(phi, Psi, chi, lam, mu, normal)
    params = {"R": R, "r": r, "m": int(m), "a": [a.real, a.imag], "b": [b.real, b.imag]}
    params.update({f"c_{k}": [v.real, v.imag] for k, v in c.items()})
    params.update({f"d_{k}": [v.real, v.imag] for k, v in d.items()})
    params.update(balance_residual=float(balance_defect), mode_residual=float(mode_defect))
    ok = bool(balance_defect <= VALIDATION_TOL and mode_defect <= VALIDATION_TOL)
    return CasePackage(
        name, "bicurved", phi, psi, Psi, None, chi, normal, lam, mu, params,
        grid_ranges=((0.0, 2 * np.pi * r), (-1.0, 1.0)), grid_counts=(32, 16), periodic=(True, False),
        expected={"el_map": ok, "el_spinor": True, "crit_i_chi_harmonic": True,
                  "crit_ii_balance": ok, "crit_iii_frame": True},
    )


def theorem3_default(**overrides):
    p = dict(R=1.0, r=1.0, m=1, a=1.0, b=0.0, c={1: 1 + 1j}, d={0: 3 * np.sqrt(2) / 2})
    p.update(overrides)
    return theorem3_family(**p)


def theorem3_broken_balance(**overrides):
    """Negative control: ``d_0`` doubled, so the balance condition fails."""
    p = dict(R=1.0, r=1.0, m=1, a=1.0, b=0.0, c={1: 1 + 1j}, d={0: 3 * np.sqrt(2)})
    p.update(overrides)
    return theorem3_family(**p, validate=False, name="theorem3-broken-eq5")


def example3_intrinsic(n=3, Phi=None, Psi0=None):
    """Only the intrinsic spinor identities of the horosphere construction (analytic)."""
    case = example3(n, Phi if Phi is not None else _default_phi(n), Psi0 if Psi0 is not None else _default_psi0(n))
    return CasePackage(
        "example3-intrinsic", "intrinsic", case.phi, None, case.Psi, case.Phi, params=case.params,
        grid_ranges=case.grid_ranges, grid_counts=(5,) * n, periodic=case.periodic,
        expected={"dirac_psi": True, "twistor": True, "balance": True, "phi_harmonic": True},
    )


def _default_phi(n):
    v = np.zeros(2 ** (n // 2), dtype=complex)
    v[0] = 1.0
    return v


def _default_psi0(n):
    v = np.zeros(2 ** (n // 2), dtype=complex)
    v[0] = 0.5
    return v


DEFAULT_PSI0 = np.array([1.0, 0.5j])
DEFAULT_PSI1 = np.array([0.3, -0.2 + 0.1j])
NONCONFORMAL_R = (0.5, 0.5, np.sqrt(2) / 2)
NONCONFORMAL_MU = (np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4), -1.0)
# satisfies sum r_j^2 mu_j = 0 as well, so the map is harmonic; still not conformal
HARMONIC_R = (0.5, 0.5, 0.5, 0.5)
HARMONIC_MU = (1.0, -1.0, np.exp(1j * np.pi / 3), -np.exp(1j * np.pi / 3))


def _example1_default(**kw):
    p = dict(r=NONCONFORMAL_R, mu=NONCONFORMAL_MU, Psi0=DEFAULT_PSI0, Psi1=DEFAULT_PSI1)
    p.update(kw)
    return example1(**p)


def _example1_harmonic(**kw):
    p = dict(r=HARMONIC_R, mu=HARMONIC_MU, Psi0=DEFAULT_PSI0, Psi1=DEFAULT_PSI1, name="example1-harmonic")
    p.update(kw)
    return example1(**p)


def _example2_default(**kw):
    p = dict(p=1, n=2, Psi0=DEFAULT_PSI0, Psi1=DEFAULT_PSI1)
    p.update(kw)
    return example2(**p)


def _example3_default(**kw):
    n = int(kw.pop("n", 3))
    p = dict(n=n, Phi=_default_phi(n), Psi0=_default_psi0(n))
    p.update(kw)
    return example3(**p)


CASES = {
    "theorem3": theorem3_default,
    "theorem3-broken-eq5": theorem3_broken_balance,
    "example1": _example1_default,
    "example1-harmonic": _example1_harmonic,
    "example2": _example2_default,
    "example3": _example3_default,
    "example3-intrinsic": example3_intrinsic,
}


def build_case(name, **params):
    try:
        ctor = CASES[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; known: {', '.join(sorted(CASES))}") from None
    return ctor(**params)


# -- verification ----------------------------------------------------------------

def _add(report, name, samples, tol):
    report.residuals[name] = Residual.from_samples(samples, tol)


def verify(case, counts=None, h=fd.DEFAULT_STEP, tolerances=None, analytic=True):
    """All residuals and criteria that apply to ``case`` on its grid."""
    tolerances = dict(tolerances or {})
    grid = case.grid(counts)
    pts = grid.points
    report = ResidualReport(grid=grid.shape, fd_step=h)
    if case.kind != "intrinsic":
        report.merge(el_residuals(case.psi, pts, h, tolerances, case.normal))
        report.merge(criteria_report(case, pts, h, analytic, tolerances))
    if case.kind == "bicurved":
        # the map is not harmonic: |tau| equals twice the mean curvature
        xi = theorem3_constants(case.params["R"], case.params["r"])["xi"]
        _add(report, "tension_vs_mean_curvature",
             [abs(report_tension(case, x, h) - 2 * xi) for x in pts],
             tolerances.get("tension_vs_mean_curvature", 1e-3))
        fd_rep = criteria_report(case, pts, h, False, {"crit_iii_frame": tolerances.get("crit_iii_frame_fd", FD_TOL)})
        report.residuals["crit_iii_frame_fd"] = fd_rep.residuals["crit_iii_frame"]
    elif case.name.startswith("example1"):
        r, mu = case.params["r"], [complex(*z) for z in case.params["mu"]]
        _add(report, "conformality_defect_modulus", [abs(conformality_defect(r, mu))], None)
        _add(report, "harmonicity_defect_modulus", [abs(harmonicity_defect(r, mu))], None)
        _add(report, "curvature_term", [vector_norm(case.phi, x, curvature_term(case.psi, x, h)) for x in pts],
             tolerances.get("curvature_term", ANALYTIC_TOL))
    elif case.name == "example2":
        p, n = case.params["p"], case.params["n"]
        fac = sequence_metric_factor(p, n)
        _add(report, "pullback_metric",
             [np.abs(pullback_metric(case.phi, x, h) - fac / (1 + x @ x) ** 2 * np.eye(2)).max() for x in pts],
             tolerances.get("pullback_metric", 1e-6))
    elif case.name == "example3":
        _add(report, "shape_identity",
             [np.abs(shape_data(case.phi, x, h, normal=case.normal).shape - np.eye(len(x))).max() for x in pts],
             tolerances.get("shape_identity", 1e-6))
    elif case.kind == "intrinsic":
        n = case.params["n"]
        Phi = case.Phi(np.zeros(n))
        _add(report, "dirac_psi", [np.linalg.norm(dirac(case.Psi, x) + n / (n - 2) * Phi) for x in pts],
             tolerances.get("dirac_psi", ALGEBRAIC_TOL))
        _add(report, "twistor", [max_twistor_residual(case.Psi, [x]) for x in pts],
             tolerances.get("twistor", ALGEBRAIC_TOL))
        _add(report, "balance", [abs(np.real(np.vdot(Phi, case.Psi(x))) - 0.5) for x in pts],
             tolerances.get("balance", ALGEBRAIC_TOL))
        _add(report, "phi_harmonic", [np.linalg.norm(dirac(case.Phi, x)) for x in pts],
             tolerances.get("phi_harmonic", ALGEBRAIC_TOL))
    for k, r in report.residuals.items():
        if r.tol is not None:
            report.criteria[k] = r.passed
    report.criteria["dirac_harmonic"] = all(
        report.residuals[k].passed for k in ("el_map", "el_spinor") if k in report.residuals
    )
    return report


def report_tension(case, x, h=fd.DEFAULT_STEP):
    return vector_norm(case.phi, x, tension_field(case.phi, x, h))


def dirac_normal_prediction(case, x):
    """Normal part of the twisted Dirac operator predicted by the adapted-frame expansion.

    For the two-curvature surface with constant chi it is
    ``sum_a lam_a e_a.psi^a = -((lam^2 - mu^2)/lam) Psi``.
    """
    lam, mu = case.lam, case.mu
    return -((lam**2 - mu**2) / lam) * case.Psi(x)


def spinor_norm_of_dirac(case, x, h=fd.DEFAULT_STEP):
    return twisted_norm(case.phi, x, twisted_dirac(case.psi, x, h))
