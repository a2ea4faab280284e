"""Randomized invariant suites, batched over trials.

Each property reports the largest violation seen over all trials and all
dimensions in ``DIMENSIONS``.  Reports contain no timing data, so a fixed
seed gives byte-identical output.
"""

import json

import numpy as np

from .clifford import anti_hermitian_defect, build_representation, relation_defect
from .dirac_harmonic import curvature_kernel, two_curvature_split
from .geometry import constant_curvature_riemann

DIMENSIONS = (2, 3, 4, 5)
ALGEBRAIC_TOL = 1e-10
FD_TOL = 5e-4
FD_STEP = 1e-3


def _spinors(rng, size, shape=()):
    return rng.normal(size=shape + (size,)) + 1j * rng.normal(size=shape + (size,))


def _herm(a, b):
    """Batched Hermitian product over the last axis."""
    return np.einsum("...s,...s->...", a.conj(), b)


def _cliff(gens, X, xi):
    """Batched ``X . xi``: X ``(..., n)``, xi ``(..., N)``."""
    return np.einsum("...a,ast,...t->...s", X, gens, xi)


def clifford_suite(rng, trials):
    out = {"clifford_relations": 0.0, "anti_hermitian": 0.0, "clifford_skew": 0.0,
           "clifford_isometry": 0.0, "real_part_vanishes": 0.0}
    for n in DIMENSIONS:
        rep = build_representation(n)
        gens = np.asarray(rep.generators)
        N = rep.fiber_dim
        out["clifford_relations"] = max(out["clifford_relations"], relation_defect(rep))
        out["anti_hermitian"] = max(out["anti_hermitian"], anti_hermitian_defect(rep))
        X = rng.normal(size=(trials, n))
        xi = _spinors(rng, N, (trials,))
        eta = _spinors(rng, N, (trials,))
        Xxi, Xeta = _cliff(gens, X, xi), _cliff(gens, X, eta)
        skew = np.abs(_herm(Xxi, eta) + _herm(xi, Xeta))
        iso = np.abs(_herm(Xxi, Xeta) - np.sum(X**2, axis=1) * _herm(xi, eta))
        re = np.abs(_herm(Xxi, xi).real)
        scale = np.linalg.norm(xi, axis=1) * np.linalg.norm(eta, axis=1) * (1 + np.sum(X**2, axis=1))
        out["clifford_skew"] = max(out["clifford_skew"], float(np.max(skew / scale)))
        out["clifford_isometry"] = max(out["clifford_isometry"], float(np.max(iso / scale)))
        out["real_part_vanishes"] = max(out["real_part_vanishes"], float(np.max(re / scale)))
    return out


def triple_product_suite(rng, trials):
    """``Re <e_a.Psi, e_b.e_c.Psi> = 0`` for all a, b, c on surfaces."""
    gens = np.asarray(build_representation(2).generators)
    Psi = _spinors(rng, 2, (trials,))
    a = np.einsum("ast,kt->kas", gens, Psi)
    bc = np.einsum("bsu,cut,kt->kbcs", gens, gens, Psi)
    val = np.einsum("kas,kbcs->kabc", a.conj(), bc).real
    norm = np.sum(np.abs(Psi) ** 2, axis=1)
    return {"surface_triple_imaginary": float(np.max(np.abs(val) / norm[:, None, None, None]))}


def _random_curvature(rng, trials, K, G):
    """Constant-curvature part plus a Gauss-type term; antisymmetric in the last two slots."""
    c = rng.normal(size=trials)
    base = np.stack([constant_curvature_riemann(ci, g) for ci, g in zip(c, G)])
    S = rng.normal(size=(trials, K, K))
    S = S + S.transpose(0, 2, 1)
    low = np.einsum("tik,tjl->tijkl", S, S) - np.einsum("til,tjk->tijkl", S, S)
    return base + np.einsum("tim,tmjkl->tijkl", np.linalg.inv(G), low)


def _random_frames(rng, trials, K):
    """Non-orthonormal frames with singular values in [0.5, 2] (condition number <= 4)."""
    U, _ = np.linalg.qr(rng.normal(size=(trials, K, K)))
    V, _ = np.linalg.qr(rng.normal(size=(trials, K, K)))
    s = rng.uniform(0.5, 2.0, size=(trials, K))
    return np.einsum("tij,tj,tjk->tik", U, s, V)


def curvature_suite(rng, trials):
    """Realness of the curvature term and independence of the target frame."""
    out = {"curvature_realness": 0.0, "curvature_frame_independence": 0.0}
    for n in DIMENSIONS:
        rep = build_representation(n)
        gens = np.asarray(rep.generators)
        N = rep.fiber_dim
        K = n + 1
        A = rng.normal(size=(trials, K, K))
        G = np.einsum("tij,tkj->tik", A, A) + K * np.eye(K)
        riem = _random_curvature(rng, trials, K, G)
        dphi = rng.normal(size=(trials, n, K))
        psi = _spinors(rng, N, (trials, K))
        ref = curvature_kernel(riem, dphi, psi, gens)
        scale = 1 + np.abs(ref).max(axis=1)
        out["curvature_realness"] = max(out["curvature_realness"], float(np.max(np.abs(ref.imag).max(axis=1) / scale)))
        # same quantities in a random frame B (rows are frame vectors in coordinates)
        B = _random_frames(rng, trials, K)
        Binv = np.linalg.inv(B)
        riem_B = np.einsum("tia,tijkl,tbj,tck,tdl->tabcd", Binv, riem, B, B, B, optimize=True)
        got = curvature_kernel(riem_B, np.einsum("taj,tjb->tab", dphi, Binv),
                               np.einsum("tjs,tja->tas", psi, Binv), gens)
        back = np.einsum("ta,tai->ti", got, B)
        out["curvature_frame_independence"] = max(
            out["curvature_frame_independence"], float(np.max(np.abs(back - ref).max(axis=1) / scale)))
    return out


def _quadratic_field(rng, n, N, trials):
    a = _spinors(rng, N, (trials,))
    b = _spinors(rng, N, (trials, n))
    c = _spinors(rng, N, (trials, n, n))
    c = c + c.transpose(0, 2, 1, 3)

    def value(x):  # x (trials, n)
        return a + np.einsum("ta,tas->ts", x, b) + 0.5 * np.einsum("ta,tb,tabs->ts", x, x, c)

    return value


def _fd_partials(value, x, h):
    n = x.shape[1]
    out = []
    for a in range(n):
        dx = np.zeros_like(x)
        dx[:, a] = h
        out.append((value(x + dx) - value(x - dx)) / (2 * h))
    return np.stack(out, axis=1)  # (trials, n, N)


def commutator_suite(rng, trials, h=FD_STEP):
    """``Dirac(e_a.Psi) + 2 nabla_a Psi + e_a.Dirac Psi = 0`` on flat R^n (finite differences)."""
    worst = 0.0
    for n in DIMENSIONS:
        gens = np.asarray(build_representation(n).generators)
        N = gens.shape[1]
        value = _quadratic_field(rng, n, N, trials)
        x = rng.uniform(-1, 1, size=(trials, n))
        dpsi = _fd_partials(value, x, h)
        dirac = np.einsum("bsu,kbu->ks", gens, dpsi)
        for a in range(n):
            ea_psi = lambda p, a=a: np.einsum("su,ku->ks", gens[a], value(p))
            d_ea = np.einsum("bsu,kbu->ks", gens, _fd_partials(ea_psi, x, h))
            res = d_ea + 2 * dpsi[:, a] + np.einsum("su,ku->ks", gens[a], dirac)
            scale = 1 + np.abs(dpsi).max(axis=(1, 2))
            worst = max(worst, float(np.max(np.abs(res).max(axis=1) / scale)))
    return {"dirac_commutator_identity": worst}


def closed_form_suite(rng, trials):
    """Closed-form split of the curvature term against the general formula.

    Hypersurface in a space of curvature c with an adapted orthonormal frame
    (random orientation in the ambient coordinates); Psi on k directions,
    Phi on the other n - k, chi on the normal.
    """
    worst = 0.0
    for n in DIMENSIONS:
        gens = np.asarray(build_representation(n).generators)
        N = gens.shape[1]
        K = n + 1
        for t in range(trials):
            k = int(rng.integers(1, n + 1))
            c = float(rng.normal())
            Psi, Phi, chi = _spinors(rng, N, (3,))
            Q, _ = np.linalg.qr(rng.normal(size=(K, K)))
            Q = Q.T  # rows: e_1..e_n (tangent), then nu
            comps = np.array([gens[a] @ (Psi if a < k else Phi) for a in range(n)] + [chi])
            psi = comps.T @ Q  # (N, K) coordinates
            dphi = Q[:n]
            general = curvature_kernel(constant_curvature_riemann(c, dim=K), dphi, psi.T, gens).real
            tan, nor = two_curvature_split(c, n, k, Psi, Phi, chi, gens)
            closed = tan @ Q[:n] + nor * Q[n]
            scale = 1 + np.abs(general).max()
            worst = max(worst, float(np.abs(general - closed).max() / scale))
    return {"two_curvature_closed_form": worst}


TOLERANCES = {
    "clifford_relations": ALGEBRAIC_TOL,
    "anti_hermitian": ALGEBRAIC_TOL,
    "clifford_skew": ALGEBRAIC_TOL,
    "clifford_isometry": ALGEBRAIC_TOL,
    "real_part_vanishes": ALGEBRAIC_TOL,
    "surface_triple_imaginary": ALGEBRAIC_TOL,
    "curvature_realness": ALGEBRAIC_TOL,
    "curvature_frame_independence": ALGEBRAIC_TOL,
    "dirac_commutator_identity": FD_TOL,
    "two_curvature_closed_form": ALGEBRAIC_TOL,
}


def run_properties(seed=42, trials=1000, tolerances=None):
    """Run every suite; returns a JSON-ready dict."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    tol = dict(TOLERANCES)
    tol.update(tolerances or {})
    rng = np.random.default_rng(seed)
    results = {}
    for suite in (clifford_suite, triple_product_suite, curvature_suite, commutator_suite, closed_form_suite):
        results.update(suite(rng, trials))
    props = {k: {"max_violation": float(v), "tol": tol[k], "pass": bool(v <= tol[k])}
             for k, v in results.items()}
    return {"seed": seed, "trials": trials, "dimensions": list(DIMENSIONS),
            "properties": props, "pass": all(p["pass"] for p in props.values())}


def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True)
