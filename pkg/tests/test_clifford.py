import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dhmaps.clifford import (
    SIGMA1, SIGMA2, act, anti_hermitian_defect, build_representation, fiber_dimension, inner,
    relation_defect,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_surface_generators_are_the_pauli_type_matrices():
    rep = build_representation(2)
    assert np.array_equal(rep.generators[0], np.array([[0, 1], [-1, 0]]))
    assert np.array_equal(rep.generators[1], np.array([[0, 1j], [1j, 0]]))
    assert np.array_equal(SIGMA1, rep.generators[0]) and np.array_equal(SIGMA2, rep.generators[1])


def test_three_dimensional_fiber_is_c2():
    assert build_representation(3).fiber_dim == 2


def test_four_dimensional_anticommutators():
    g = build_representation(4).generators
    for a in range(4):
        for b in range(4):
            assert np.allclose(g[a] @ g[b] + g[b] @ g[a], -2 * (a == b) * np.eye(4), atol=0)


@pytest.mark.parametrize("n", range(1, 9))
def test_relations_and_skewness_every_dimension(n):
    rep = build_representation(n)
    assert rep.fiber_dim == fiber_dimension(n) == 2 ** (n // 2)
    assert relation_defect(rep) == 0.0
    assert anti_hermitian_defect(rep) == 0.0


@pytest.mark.parametrize("bad", [0, -1, 9, 2.0, "3"])
def test_bad_dimension_rejected(bad):
    with pytest.raises(ValueError):
        build_representation(bad)


def test_act_first_generator():
    rep = build_representation(2)
    assert np.array_equal(act(rep, [1, 0], [1, 0]), np.array([0, -1]))


def test_act_twice_is_minus_identity():
    rep = build_representation(2)
    xi = np.array([0.3 + 1j, -2.0])
    assert np.allclose(act(rep, [1, 0], act(rep, [1, 0], xi)), -xi, atol=0)


def test_unit_vector_acts_isometrically():
    rep = build_representation(3)
    xi = np.random.default_rng(3).normal(size=2) + 1j
    v = np.ones(3) / np.sqrt(3)
    assert np.linalg.norm(act(rep, v, xi)) == pytest.approx(np.linalg.norm(xi), abs=1e-14)


def test_act_shape_errors():
    rep = build_representation(3)
    with pytest.raises(ValueError):
        act(rep, [1, 0], [1, 0])
    with pytest.raises(ValueError):
        act(rep, [1, 0, 0], [1, 0, 0])


def test_inner_unit_vector():
    assert inner([1, 0], [1, 0]) == 1


def test_inner_orthogonal_basis_vectors_vanish():
    # (1,0) and (0,i) are orthogonal, whichever slot is conjugated
    assert inner([1, 0], [0, 1j]) == 0


def test_inner_conjugates_first_slot():
    assert inner([1j, 0], [1, 0]) == -1j
    with pytest.raises(ValueError):
        inner([1, 0], [1, 0, 0])


def test_volume_element_squares_to_scalar():
    for n in range(1, 7):
        rep = build_representation(n)
        w = rep.volume()
        w2 = w @ w
        assert np.allclose(w2, w2[0, 0] * np.eye(rep.fiber_dim), atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 6), v=st.lists(finite, min_size=6, max_size=6),
       re=st.lists(finite, min_size=8, max_size=8), im=st.lists(finite, min_size=8, max_size=8))
def test_vector_action_skew_and_isometric(n, v, re, im):
    rep = build_representation(n)
    N = rep.fiber_dim
    v = np.array(v[:n])
    xi = np.array(re[:N]) + 1j * np.array(im[:N])
    Xxi = act(rep, v, xi)
    scale = 1 + np.dot(v, v) * np.vdot(xi, xi).real
    assert abs(np.vdot(Xxi, xi).real) <= 1e-12 * scale
    assert abs(np.vdot(Xxi, Xxi).real - np.dot(v, v) * np.vdot(xi, xi).real) <= 1e-12 * scale
