from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbwalk import determinants as dt
from nbwalk import errors
from nbwalk import graph as G
from nbwalk import green as gr
from nbwalk import operators as op


def direct_sides(g, z, weights=None):
    """Both sides of the Green determinant identity with plain det and products."""
    zf = gr.solve_zeta(g, z, weights=weights)
    w = weights or G.Weights.unit(g)
    A, Bp = op.schrodinger(g, w)
    left = np.prod(-zf.Ge / w.p) * np.linalg.det(np.diag(1 / zf.zeta) - Bp)
    right = np.linalg.det(z * np.eye(g.vertex_count) - A) * np.prod(-zf.Gv)
    return left, right


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


# --- log-space helpers


def test_relative_error_log():
    a, b = 3 + 4j, 3 + 4.000001j
    assert dt.relative_error_log(np.log(a), np.log(b)) == pytest.approx(rel(a, b), rel=1e-6)
    assert dt.relative_error_log(0j, 0j) == 0.0
    assert dt.relative_error_log(0j, complex(np.inf, 0)) == np.inf


def test_logdet_matches_det():
    M = np.random.default_rng(0).normal(size=(6, 6)) + 1j
    assert np.exp(dt.logdet(M)) == pytest.approx(np.linalg.det(M))
    with pytest.raises(errors.SingularFactorization):
        dt.logdet(np.zeros((3, 3)))


def test_logdet_large_no_overflow():
    M = 1e3 * np.eye(400)
    assert dt.logdet(M).real == pytest.approx(400 * np.log(1e3))


# --- Green determinant identity


def test_thm13_triangle(triangle):
    rep = dt.thm13_check(triangle, 2j)
    assert rep.max_rel_error < 1e-10 and rep.passed
    a, b = direct_sides(triangle, 2j)
    assert rel(a, b) < 1e-10
    assert rep.lhs[0] == pytest.approx(a, rel=1e-10)


def test_thm13_k4(k4):
    rep = dt.thm13_check(k4, 1 + 1j)
    assert rep.max_rel_error < 1e-10
    a, _ = direct_sides(k4, 1 + 1j)
    assert rep.lhs[0] == pytest.approx(a, rel=1e-10)


def test_thm13_k4_degree_weights(k4):
    w = G.degree_normalised_weights(k4)
    rep = dt.thm13_check(k4, 2j, weights=w)
    assert rep.passed and rep.max_rel_error < 1e-10
    assert dt.similarity_check(k4, 2j) < 1e-12
    _, b = direct_sides(k4, 2j, w)
    zf = gr.solve_zeta(k4, 2j, weights=w)
    detP = np.linalg.det(2j * np.eye(4) - op.laplacian_P(k4))
    assert b == pytest.approx(detP * np.prod(-zf.Gv), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), re=st.floats(-2, 2), im=st.floats(0.5, 2))
def test_thm13_weighted_random(seed, re, im):
    rng = np.random.default_rng(seed)
    g = G.random_min_degree(int(rng.integers(3, 15)), 2, 4, seed=seed)
    if not G.validate(g).is_connected:
        return
    w = G.random_weights(g, rng)
    z = complex(re, im)
    rep = dt.thm13_check(g, z, weights=w)
    assert rep.max_rel_error < 1e-7
    a, b = direct_sides(g, z, w)
    assert rel(a, b) < 1e-7


def test_thm13_detects_wrong_convention(k4):
    # feeding the unweighted field to the weighted sides must break the identity
    w = G.random_weights(k4, np.random.default_rng(3))
    zf = gr.solve_zeta(k4, 1 + 1j)
    rep = dt.thm13_check(k4, 1 + 1j, weights=w, zf=zf)
    assert not rep.passed


# --- Ihara


def test_ihara_triangle_closed_form(triangle):
    u = dt.default_u_samples(triangle)
    assert len(u) == 13
    rep = dt.ihara_check(triangle, u)
    assert np.allclose(rep.lhs, (1 - u**3) ** 2, rtol=1e-12)
    assert np.allclose(rep.rhs, (1 - u) ** 2 * (1 + u + u**2) ** 2, rtol=1e-12)
    assert rep.max_rel_error < 1e-12


def test_ihara_c4_closed_form(c4):
    rep = dt.ihara_check(c4)
    u = np.array(rep.samples)
    assert np.allclose(rep.lhs, (1 - u**4) ** 2, rtol=1e-12)
    expanded = (1 - 2 * u + u**2) * (1 + u**2) ** 2 * (1 + 2 * u + u**2)
    assert np.allclose(rep.rhs, expanded, rtol=1e-12)


def test_ihara_k4(k4):
    u = 0.45 * np.exp(2j * np.pi * (np.arange(25) + 0.3) / 25)
    rep = dt.ihara_check(k4, u)
    assert rep.max_rel_error < 1e-9
    closed = (1 - u**2) ** 2 * (1 - u) * (1 - 2 * u) * (1 + u + 2 * u**2) ** 3
    assert np.allclose(rep.lhs, closed, rtol=1e-10)
    reg = dt.ihara_regular_check(k4, u)
    assert reg.max_rel_error < 1e-9


def test_ihara_irregular():
    g = G.random_min_degree(20, 2, 5, seed=11)
    rep = dt.ihara_check(g)
    assert len(rep.samples) == 2 * g.n_directed + 1
    assert rep.passed
    with pytest.raises(errors.NotRegular):
        dt.ihara_regular_check(g)


def test_ihara_disconnected():
    g = G.parse_edge_list("0 1\n1 2\n2 0\n3 4\n4 5\n5 3")
    with pytest.raises(errors.Disconnected):
        dt.ihara_check(g)


def test_ihara_pole_on_tree():
    t = G.path_tree(3)
    with pytest.raises(errors.SampleAtPole):
        dt.ihara_check(t, [1.0])


# --- regular reduction


@pytest.mark.parametrize(
    "g, z", [(G.complete(4), 2j), (G.petersen(), 1 + 1j), (G.cycle(3), 2j)], ids=repr
)
def test_regular_reduction(g, z):
    rep = dt.regular_reduction_check(g, z)
    assert rep.max_rel_error < 1e-9
    assert rep.extras["Gv_closed_form_error"] < 1e-10
    assert rep.extras["Ge_closed_form_error"] < 1e-10
    assert rep.extras["vs_direct_lhs"] < 1e-9 and rep.extras["vs_direct_rhs"] < 1e-9
    assert rep.extras["quadratic_residual"] < 1e-10


def test_regular_reduction_rejects_irregular():
    with pytest.raises(errors.NotRegular):
        dt.regular_reduction_check(G.random_min_degree(10, 2, 4, seed=1), 1j)


# --- proof operators


@pytest.mark.parametrize("g, z", [(G.cycle(3), 2j), (G.complete(4), 1 + 1j)], ids=repr)
def test_intertwining(g, z):
    assert dt.intertwining_residual(g, z) < 1e-9


def test_intertwining_needs_successor_form(k4):
    zf = gr.solve_zeta(k4, 1 + 1j)
    H, L = dt.intertwining_matrices(k4, zf)
    A = op.adjacency(k4)
    pred = H @ (np.diag(1 / zf.zeta) - op.nb_B(k4)) - (A - zf.z * np.eye(4)) @ L
    assert np.max(np.abs(pred)) > 1e-3


def test_intertwining_corruption(k4):
    zf = gr.solve_zeta(k4, 1 + 1j)
    zeta = zf.zeta.copy()
    zeta[0] = -zeta[0]
    bad = replace(zf, zeta=zeta)
    assert dt.intertwining_residual(k4, zf=bad) > 1e-2


@pytest.mark.parametrize("g", [G.cycle(3), G.complete(4)], ids=repr)
def test_detK(g):
    rep = dt.detK_check(g, 2j)
    assert rep.max_rel_error < 1e-10
    assert rep.extras["max_block_rel_error"] < 1e-10


def test_detK_blocks_closed_form(k4):
    zf = gr.solve_zeta(k4, 2j)
    for k, (x, y) in enumerate(k4.undirected_edges):
        a, b = 2 * k, 2 * k + 1
        expected = (1 - zf.zeta[a] * zf.zeta[b]) / (2 * zf.m[x] * 2 * zf.m[y])
        block = dt.detK_blocks(k4, zf)[k, 0]
        assert block == pytest.approx(expected, rel=1e-12)
        assert block == pytest.approx(-zf.Ge[k], rel=1e-10)


@pytest.mark.parametrize("g", [G.cycle(3), G.complete(4), G.petersen(), G.random_min_degree(15, 2, 5, seed=2)], ids=repr)
def test_kernel_statements(g):
    N = dt.origin_kernel_basis(g)
    assert N.shape[1] == g.n_directed - g.vertex_count
    assert dt.kernel_characterization_residual(g) < 1e-9
    assert dt.kernel_action_residual(g, 1 + 1j) < 1e-9


def test_report_dict(triangle):
    d = dt.thm13_check(triangle, 2j).as_dict()
    assert set(d) >= {"identity", "samples", "rel_errors", "max_rel_error", "passed", "tol"}
    assert d["passed"] is True
