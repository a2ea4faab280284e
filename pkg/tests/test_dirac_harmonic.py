import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dhmaps.clifford import build_representation
from dhmaps.dirac_harmonic import (
    Residual, ResidualReport, action_functional, assemble_psi_bicurved, assemble_psi_hypersurface,
    assemble_psi_tangent, curvature_kernel, curvature_term, curvature_term_splits, el_residuals,
    hypersurface_expansion, hypersurface_criteria, two_curvature_criteria, twisted_covariant_derivatives,
    twisted_dirac, twisted_field, twisted_norm, two_curvature_split,
)
from dhmaps.examples import build_case, dirac_normal_prediction, theorem3_constants
from dhmaps.geometry import constant_curvature_riemann, space_form
from dhmaps.grids import midpoint_grid
from dhmaps.maps import SmoothMap, frame_differential, shape_data, tension_field
from dhmaps.spinors import SpinorField, constant_field, covariant_derivatives, dirac, flat

XI = theorem3_constants(1.0, 1.0)["xi"]


@pytest.fixture(scope="module")
def t3():
    return build_case("theorem3")


@pytest.fixture(scope="module")
def ex1():
    return build_case("example1")


# -- assembly ----------------------------------------------------------------------

def test_zero_spinor_assembles_to_zero(ex1):
    zero = constant_field(ex1.Psi.domain, [0, 0])
    psi = assemble_psi_tangent(ex1.phi, zero)
    assert np.abs(psi(np.array([0.2, 0.1]))).max() == 0.0


def test_tangent_assembly_is_frame_independent(ex1):
    a = 0.73
    rot = np.array([[np.cos(a), np.sin(a)], [-np.sin(a), np.cos(a)]])
    p1 = assemble_psi_tangent(ex1.phi, ex1.Psi)
    p2 = assemble_psi_tangent(ex1.phi, ex1.Psi, rotation=rot)
    for x in ([0.0, 0.0], [0.3, -0.6]):
        assert np.abs(p1(np.array(x)) - p2(np.array(x))).max() <= 1e-12
    with pytest.raises(ValueError):
        assemble_psi_tangent(ex1.phi, ex1.Psi, rotation=np.ones((2, 2)))


def test_tangent_assembly_at_origin(ex1):
    x = np.zeros(2)
    g = ex1.Psi.rep.generators
    d = frame_differential(ex1.phi, x)
    expected = sum(np.outer(g[a] @ ex1.Psi(x), d[a]) for a in range(2))
    assert np.allclose(ex1.psi(x), expected, atol=1e-14)


def test_hypersurface_assembly_without_normal_spinor_matches_tangent(t3):
    zero = constant_field(t3.Psi.domain, [0, 0])
    p1 = assemble_psi_hypersurface(t3.phi, t3.Psi, zero, t3.normal)
    x = np.array([0.4, 0.3])
    g = t3.Psi.rep.generators
    d = frame_differential(t3.phi, x)
    expected = sum(np.outer(g[a] @ t3.Psi(x), d[a]) for a in range(2))
    assert np.allclose(p1(x), expected, atol=1e-14)


def test_horosphere_normal_component_is_phi():
    case = build_case("example3")
    amb = case.phi.target.ambient
    for X in ([0, 0, 0], [0.5, -1.0, 0.7]):
        X = np.array(X, float)
        nu = case.normal(X)
        assert np.allclose(case.psi(X) @ (amb.signature * nu), case.Phi(X), atol=1e-12)


def test_normal_spinor_only_has_no_tangent_part():
    case = build_case("example3")
    zero = constant_field(case.Psi.domain, [0, 0])
    psi = assemble_psi_hypersurface(case.phi, zero, case.Phi, case.normal)
    X = np.array([0.2, 0.1, -0.3])
    d = frame_differential(case.phi, X)
    amb = case.phi.target.ambient
    assert np.abs(psi(X) @ (amb.signature[:, None] * d.T)).max() <= 1e-12


def test_bicurved_coefficient_and_zero_data(t3):
    assert -t3.mu / t3.lam == pytest.approx(-0.5, abs=1e-15)
    zero = constant_field(t3.Psi.domain, [0, 0])
    psi = assemble_psi_bicurved(t3.phi, zero, zero, t3.lam, t3.mu, t3.normal)
    assert np.abs(psi(np.array([0.1, 0.2]))).max() == 0.0
    with pytest.raises(ValueError):
        assemble_psi_bicurved(t3.phi, zero, zero, 0.0, 1.0, t3.normal)
    with pytest.raises(ValueError):
        assemble_psi_bicurved(t3.phi, zero, zero, 1.0, 1.0, t3.normal)


def test_assembled_field_is_tangent_to_quadric(t3):
    for x in t3.grid((4, 3)).points:
        assert t3.psi.tangency_defect(x) <= 1e-10


# -- curvature term -----------------------------------------------------------------

def test_tangent_construction_has_vanishing_curvature_term(ex1):
    for x in ([0.0, 0.0], [0.5, -0.2]):
        assert np.abs(curvature_term(ex1.psi, np.array(x))).max() <= 1e-10


def test_flat_target_has_vanishing_curvature_term():
    phi = SmoothMap(flat(2), space_form("flat", 3), lambda x: np.array([x[0], x[1], x[0] * x[1]]))
    rng = np.random.default_rng(2)
    psi = twisted_field(phi, lambda p: rng.normal(size=(2, 3)) + 0j, build_representation(2))
    assert np.abs(curvature_term(psi, np.array([0.1, 0.3]))).max() == 0.0


def test_curvature_term_independent_of_target_frame(t3):
    x = np.array([0.9, -0.4])
    a = curvature_term(t3.psi, x)
    b = curvature_term(t3.psi, x, rng=np.random.default_rng(7))
    assert np.abs(a - b).max() <= 1e-12


def test_split_tangent_part_vanishes_and_normal_part_is_mean_curvature(t3):
    for x in ([0.0, 0.0], [2.0, 0.5]):
        x = np.array(x)
        tan, nor = curvature_term_splits(t3.psi, x)
        assert np.abs(tan).max() <= 1e-12
        # the normal part equals H = xi nu, half of the tension 2 xi nu
        assert np.allclose(nor, XI * t3.normal(x), atol=1e-12)
        assert np.allclose(tan + nor, curvature_term(t3.psi, x), atol=1e-12)


def test_normal_part_vanishes_when_chi_is_orthogonal():
    gens = np.asarray(build_representation(3).generators)
    rng = np.random.default_rng(5)
    Psi, Phi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    chi = 1j * (2 * Psi + 1 * Phi)
    _, nor = two_curvature_split(-1.0, 3, 2, Psi, Phi, chi, gens)
    assert abs(nor) <= 1e-14


def test_closed_form_normal_part_is_half_of_printed_coefficient():
    # the normal part is -c Re<chi, k Psi + (n-k) Phi>; a coefficient 2c would double it
    gens = np.asarray(build_representation(2).generators)
    rng = np.random.default_rng(9)
    Psi, Phi, chi = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    c = -1.0
    comps = np.array([gens[0] @ Psi, gens[1] @ Phi, chi])
    dphi = np.eye(3)[:2]
    general = curvature_kernel(constant_curvature_riemann(c, dim=3), dphi, comps, gens)
    assert abs(general.imag).max() <= 1e-14
    expected = -c * np.real(np.vdot(chi, Psi + Phi))
    assert general[2].real == pytest.approx(expected, abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 5), k=st.integers(1, 5), c=st.floats(-3, 3), seed=st.integers(0, 2**31))
def test_closed_form_split_matches_general_kernel(n, k, c, seed):
    k = min(k, n)
    gens = np.asarray(build_representation(n).generators)
    N = gens.shape[1]
    rng = np.random.default_rng(seed)
    Psi, Phi, chi = rng.normal(size=(3, N)) + 1j * rng.normal(size=(3, N))
    comps = np.array([gens[a] @ (Psi if a < k else Phi) for a in range(n)] + [chi])
    general = curvature_kernel(constant_curvature_riemann(c, dim=n + 1), np.eye(n + 1)[:n], comps, gens)
    tan, nor = two_curvature_split(c, n, k, Psi, Phi, chi, gens)
    scale = 1 + np.abs(general).max()
    assert np.abs(general.real - np.append(tan, nor)).max() <= 1e-12 * scale


# -- Dirac operator along the map ---------------------------------------------------

def test_constant_map_reduces_to_spinor_dirac():
    phi = SmoothMap(flat(2), space_form("flat", 3), lambda x: np.array([1.0, 2.0, 3.0]))
    v0 = np.array([0.2, -1.0, 0.5])
    Psi = SpinorField(flat(2), lambda x: np.array([np.sin(x[0]) + 1j * x[1], x[0] * x[1]]))
    psi = twisted_field(phi, lambda p: np.outer(Psi(p), v0), build_representation(2))
    x = np.array([0.3, -0.5])
    assert np.allclose(twisted_dirac(psi, x), np.outer(dirac(Psi, x), v0), atol=1e-8)


def test_surface_identity_for_tangent_construction(ex1):
    """``Dirac psi + Psi (x) tau + 2 (nabla_a Psi + e_a.Dirac Psi / 2) (x) phi_* e_a = 0``."""
    Psi = SpinorField(ex1.Psi.domain, lambda x: np.array([x[0] ** 2, np.sin(x[1]) + 1j * x[0]]))
    psi = assemble_psi_tangent(ex1.phi, Psi)
    g = Psi.rep.generators
    for x in ([0.1, 0.2], [-0.4, 0.3]):
        x = np.array(x)
        nab = covariant_derivatives(Psi, x)
        D = dirac(Psi, x)
        d = frame_differential(ex1.phi, x)
        total = twisted_dirac(psi, x) + np.outer(Psi(x), tension_field(ex1.phi, x))
        total += sum(np.outer(2 * nab[a] + g[a] @ D, d[a]) for a in range(2))
        assert np.abs(total).max() <= 5e-4


def test_expansion_matches_direct_dirac_on_random_field(t3):
    rng = np.random.default_rng(11)
    A, B = rng.normal(size=(2, 2, 4)) + 1j * rng.normal(size=(2, 2, 4))

    def fn(p):
        return A * np.cos(p[0]) + B * p[1] ** 2

    psi = twisted_field(t3.phi, fn, build_representation(2))
    for x in ([0.3, 0.2], [4.0, -0.6]):
        x = np.array(x)
        direct = twisted_dirac(psi, x)
        assert np.abs(direct - hypersurface_expansion(psi, x, t3.normal)).max() <= 1e-6
        # dropping the second-fundamental-form term of the tangent frame breaks agreement
        short = hypersurface_expansion(psi, x, t3.normal, complete=False)
        assert np.abs(direct - short).max() > 1e-2


def test_two_curvature_surface_dirac_split(t3):
    amb = t3.phi.target.ambient
    for x in ([0.0, 0.0], [1.7, 0.8]):
        x = np.array(x)
        D = twisted_dirac(t3.psi, x)
        nu = t3.normal(x)
        DN = np.outer(D @ (amb.signature * nu), nu)
        assert twisted_norm(t3.phi, x, D - DN) <= 5e-4
        # normal part: Dirac chi + sum lam_a e_a.psi^a, i.e. -((lam^2 - mu^2)/lam) Psi
        assert np.allclose(D @ (amb.signature * nu), dirac_normal_prediction(t3, x), atol=1e-6)


def test_covariant_derivatives_shape(t3):
    cov = twisted_covariant_derivatives(t3.psi, np.array([0.1, 0.1]))
    assert cov.shape == (2, 2, 4)


# -- reports and criteria -----------------------------------------------------------

def test_residual_report_gating():
    rep = ResidualReport()
    rep.residuals["a"] = Residual.from_samples([1e-9, 2e-9], 1e-8)
    rep.residuals["diag"] = Residual.from_samples([5.0], None)
    assert rep.passed and rep.residuals["diag"].passed is None
    rep.residuals["b"] = Residual.from_samples([1.0], 1e-3)
    assert not rep.passed
    assert rep.to_dict()["residuals"]["b"] == {"max": 1.0, "mean": 1.0, "tol": 1e-3, "pass": False}
    with pytest.raises(ValueError):
        Residual.from_samples([], 1.0)


def test_el_residuals_two_curvature_surface(t3):
    pts = t3.grid((4, 3)).points
    rep = el_residuals(t3.psi, pts)
    r = rep.residuals
    assert r["tension"].max == pytest.approx(2 * XI, abs=1e-6)
    # the curvature term supplies H, the tension is 2H: the map equation misses by xi
    assert r["el_map"].max == pytest.approx(XI, abs=1e-6)
    assert r["r_tangent"].max <= 1e-10 and r["dirac_tangent"].max <= 5e-4
    lam, mu = t3.lam, t3.mu
    assert r["dirac_normal"].max == pytest.approx(
        max((lam**2 - mu**2) / lam * np.linalg.norm(t3.Psi(x)) for x in pts), rel=1e-6)
    with pytest.raises(ValueError):
        el_residuals(t3.psi, np.zeros((0, 2)))


def test_el_residuals_corrected_torus_case():
    case = build_case("example1-harmonic")
    rep = el_residuals(case.psi, case.grid((3, 3)).points)
    assert rep.passed


def test_two_curvature_criteria_hold(t3):
    pts = t3.grid((6, 4)).points
    rep = two_curvature_criteria(t3.phi, t3.Psi, t3.chi, t3.lam, t3.mu, pts, normal=t3.normal)
    assert all(rep.criteria.values())
    fd_rep = two_curvature_criteria(t3.phi, t3.Psi, t3.chi, t3.lam, t3.mu, pts, normal=t3.normal, analytic=False)
    assert fd_rep.residuals["crit_iii_frame"].max <= 5e-4


def test_non_harmonic_chi_fails_only_first_criterion(t3):
    # agrees with chi at the grid points (sin 16 theta = 0 there) but is not harmonic
    bumped = SpinorField(t3.chi.domain, lambda x: t3.chi(x) + np.array([0.1 * np.sin(16 * x[0]), 0]))
    pts = t3.grid((32, 3)).points
    base = two_curvature_criteria(t3.phi, t3.Psi, t3.chi, t3.lam, t3.mu, pts, normal=t3.normal, analytic=False)
    rep = two_curvature_criteria(t3.phi, t3.Psi, bumped, t3.lam, t3.mu, pts, normal=t3.normal, analytic=False)
    assert not rep.criteria["crit_i_chi_harmonic"]
    for k in ("crit_ii_balance", "crit_iii_frame"):
        assert rep.criteria[k] and rep.residuals[k].max == pytest.approx(base.residuals[k].max, abs=1e-12)


def _clifford_torus():
    s = np.sqrt(2)

    def fn(x):
        return np.array([np.cos(s * x[0]), np.sin(s * x[0]), np.cos(s * x[1]), np.sin(s * x[1])]) / s

    return SmoothMap(flat(2), space_form("sphere", 3, 1.0), fn, "Clifford torus")


def test_minimal_surface_without_normal_spinor_reduces_to_twistor_condition():
    phi = _clifford_torus()
    g = build_representation(2).generators
    P0, P1 = np.array([1.0, 0.5j]), np.array([0.3, -0.2])
    twistor = SpinorField(flat(2), lambda x: P0 - 0.5 * (x[0] * g[0] + x[1] * g[1]) @ P1,
                          lambda x: np.array([-0.5 * g[0] @ P1, -0.5 * g[1] @ P1]))
    other = SpinorField(flat(2), lambda x: np.array([x[0], 0j]), lambda x: np.array([[1, 0], [0, 0]]) + 0j)
    zero = constant_field(flat(2), [0, 0])
    pts = np.array([[0.1, 0.2], [0.7, -0.3]])
    good = hypersurface_criteria(phi, twistor, zero, pts)
    assert good.residuals["phi_harmonic"].max == 0.0
    assert good.residuals["normal_balance"].max <= 1e-6  # minimal, and Phi = 0
    assert good.residuals["frame_equation"].max <= 1e-10
    bad = hypersurface_criteria(phi, other, zero, pts)
    assert bad.residuals["normal_balance"].passed and not bad.residuals["frame_equation"].passed


# -- action ------------------------------------------------------------------------

def test_action_of_identity_on_unit_square():
    phi = SmoothMap(flat(2), space_form("flat", 2), lambda x: x, "id")
    act = action_functional(None, midpoint_grid([(0, 1), (0, 1)], (4, 4)), phi=phi)
    assert act.energy == pytest.approx(1.0, abs=1e-9) and act.spinor == 0.0


def test_action_of_constant_map_and_zero_spinor():
    phi = SmoothMap(flat(2), space_form("flat", 2), lambda x: np.array([1.0, 2.0]), "const")
    zero = twisted_field(phi, lambda p: np.zeros((2, 2)), build_representation(2))
    act = action_functional(zero, midpoint_grid([(0, 1), (0, 1)], (3, 3)))
    assert act.total == 0.0


def test_action_on_two_curvature_surface(t3):
    grid = midpoint_grid(t3.grid_ranges, (8, 4))
    act = action_functional(t3.psi, grid)
    assert np.isfinite(act.total) and act.spinor_imag < 1e-6
    # the spinor term comes entirely from the normal part <chi, -((lam^2-mu^2)/lam) Psi>
    kappa = (t3.lam**2 - t3.mu**2) / t3.lam
    expected = sum(0.5 * w * np.real(np.vdot(t3.chi(x), -kappa * t3.Psi(x)))
                   for x, w in zip(grid.points, grid.weights))
    assert act.spinor == pytest.approx(expected, rel=1e-6)
    with pytest.raises(ValueError):
        action_functional(t3.psi, t3.grid((4, 3)))
