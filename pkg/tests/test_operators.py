import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbwalk import errors
from nbwalk import graph as G
from nbwalk import operators as op

GRAPHS = [G.cycle(3), G.complete(4), G.cycle(4), G.petersen(), G.random_min_degree(15, 2, 5, seed=3)]


def brute_B(g):
    """B(e, e') = 1 iff t(e') = o(e) and e' is not the reversal of e, straight from the tables."""
    nB = g.n_directed
    B = np.zeros((nB, nB))
    for e in range(nB):
        for ep in range(nB):
            if g.terminus[ep] == g.origin[e] and not (
                g.origin[ep] == g.terminus[e] and g.terminus[ep] == g.origin[e]
            ):
                B[e, ep] = 1
    return B


def test_adjacency_spectra(triangle, k4):
    assert np.allclose(np.linalg.eigvalsh(op.adjacency(triangle)), [-1, -1, 2])
    assert np.allclose(np.linalg.eigvalsh(op.adjacency(k4)), [-1, -1, -1, 3])


@pytest.mark.parametrize("g", GRAPHS, ids=repr)
def test_adjacency_structure(g):
    A = op.adjacency(g)
    assert np.array_equal(A, A.T)
    assert np.all(np.diag(A) == 0)
    assert np.array_equal(A.sum(axis=1), g.degrees)


def test_laplacian_examples(triangle, k4):
    P = op.laplacian_P(triangle)
    assert np.allclose(P, op.adjacency(triangle) / 2)
    assert np.allclose(np.sort(np.linalg.eigvals(P).real), [-0.5, -0.5, 1])
    assert np.allclose(op.laplacian_P(k4), op.adjacency(k4) / 3)


@pytest.mark.parametrize("g", GRAPHS, ids=repr)
def test_laplacian_structure(g):
    P = op.laplacian_P(g)
    assert np.allclose(P.sum(axis=1), 1)
    d = np.sqrt(g.degrees)
    sym = d[:, None] * P / d[None, :]
    assert np.max(np.abs(sym - sym.T)) < 1e-12
    assert np.allclose(sym, op.symmetrised_P(g))


@pytest.mark.parametrize("g", GRAPHS, ids=repr)
def test_B_matches_definition(g):
    assert np.array_equal(op.nb_B(g), brute_B(g))


@pytest.mark.parametrize("g", GRAPHS, ids=repr)
def test_S_stochastic_both_ways(g):
    S = op.nb_S(g)
    assert np.allclose(S.sum(axis=1), 1)
    assert np.allclose(S.sum(axis=0), 1)
    assert np.allclose(S, np.diag(1.0 / g.Q[g.origin]) @ op.nb_B(g))


def test_triangle_B_is_two_three_cycles(triangle):
    B = op.nb_B(triangle)
    assert np.array_equal(B.sum(axis=0), np.ones(6)) and np.array_equal(B.sum(axis=1), np.ones(6))
    assert np.array_equal(np.linalg.matrix_power(B, 3), np.eye(6))
    assert not np.array_equal(B, np.eye(6))


def test_k4_S_rows(k4):
    S = op.nb_S(k4)
    for row in S:
        assert sorted(row[row > 0].tolist()) == [0.5, 0.5]


def test_sparse_switch():
    g = G.cycle(5)
    assert np.array_equal(op.nb_B(g, dense=False).toarray(), op.nb_B(g))


def test_schrodinger_unit_weights(k4):
    H, Bp = op.schrodinger(k4, G.Weights.unit(k4))
    assert np.array_equal(H, op.adjacency(k4))
    assert np.array_equal(Bp, op.nb_B(k4))


@pytest.mark.parametrize("g", GRAPHS, ids=repr)
def test_schrodinger_degree_weights_similar_to_P(g):
    H, _ = op.schrodinger(g, G.degree_normalised_weights(g))
    assert np.allclose(np.linalg.eigvalsh(H), np.linalg.eigvalsh(op.symmetrised_P(g)))
    d = np.sqrt(g.degrees)
    assert np.allclose(H, d[:, None] * op.laplacian_P(g) / d[None, :])


def test_schrodinger_constant_potential(triangle):
    H, _ = op.schrodinger(triangle, G.Weights(np.ones(3), np.full(3, 5.0)))
    assert np.allclose(np.linalg.eigvalsh(H), [4, 4, 7])


def test_schrodinger_Bp_pattern():
    g = G.petersen()
    w = G.random_weights(g, np.random.default_rng(1))
    H, Bp = op.schrodinger(g, w)
    assert np.array_equal(H, H.T)
    pe = w.directed(g)
    assert np.allclose(Bp, brute_B(g) * pe[None, :])


def test_schrodinger_mismatch(k4):
    with pytest.raises(errors.WeightMismatch):
        op.schrodinger(k4, G.Weights(np.ones(5), np.zeros(4)))


@pytest.mark.parametrize("g", GRAPHS, ids=repr)
def test_lifts(g):
    O, T, cP = op.lifts_and_projector(g)
    S = op.nb_S(g)
    assert np.allclose(S @ T, O)
    rng = np.random.default_rng(0)
    f = rng.normal(size=g.vertex_count) + 1j * rng.normal(size=g.vertex_count)
    assert np.isclose(np.linalg.norm(O @ f) ** 2, op.vertex_norm2(g, f))
    assert np.isclose(np.linalg.norm(T @ f) ** 2, op.vertex_norm2(g, f))
    E = O @ cP
    assert np.allclose(E @ E, E)


def test_triangle_projector(triangle):
    cP = op.origin_average(triangle)
    for x in range(3):
        row = cP[x]
        assert sorted(row[row > 0].tolist()) == [0.5, 0.5]
        assert all(triangle.origin[e] == x for e in np.flatnonzero(row))


def test_decompose_identity_on_summand(k4):
    rng = np.random.default_rng(2)
    g = rng.normal(size=4)
    g -= np.dot(k4.degrees, g) / k4.degrees.sum()
    f = op.lift_O(k4) @ g
    F, Gf, H = op.decompose(k4, f)
    assert np.allclose(F, f) and np.allclose(Gf, 0) and np.allclose(H, 0)


@pytest.mark.parametrize("g", [G.complete(4), G.petersen(), G.random_min_degree(14, 3, 5, seed=1)], ids=repr)
def test_decompose_parts(g):
    rng = np.random.default_rng(5)
    f = rng.normal(size=g.n_directed) + 1j * rng.normal(size=g.n_directed)
    f -= f.mean()
    F, Gf, H = op.decompose(g, f)
    assert np.allclose(F + Gf + H, f)
    O, T, cP = op.lifts_and_projector(g)
    # F constant on out-stars, G on in-stars
    assert np.allclose(F, O @ (cP @ F))
    assert np.allclose(Gf, T @ (cP @ (op.reversal_matrix(g) @ Gf)))
    # H sums to zero at every vertex in both directions
    assert np.allclose(O.T @ H, 0) and np.allclose(T.T @ H, 0)
    assert abs(F.sum()) < 1e-10 and abs(Gf.sum()) < 1e-10


def test_decompose_rejects(c4, k4):
    with pytest.raises(errors.BipartiteInput):
        op.decompose(c4, np.zeros(8))
    with pytest.raises(errors.NotMeanZero):
        op.decompose(k4, np.ones(12))


@pytest.mark.parametrize(
    "g, dims",
    [(G.complete(4), (3, 3, 5)), (G.cycle(3), (2, 2, 1)), (G.petersen(), (9, 9, 11))],
    ids=repr,
)
def test_decomposition_dims(g, dims):
    rep = op.decomposition_report(g)
    assert (rep.dim_O, rep.dim_T, rep.dim_H) == dims
    assert rep.dim_H == rep.expected_dim_H == 2 * g.n_edges - 2 * g.vertex_count + 1
    assert rep.dims_sum == g.n_directed - 1
    assert rep.orthogonality_residual < 1e-10
    assert rep.rank_minus_one == g.rank - 1


def test_dirichlet_constant(k4):
    lhs, rhs = op.dirichlet_checks(k4, np.full(4, 2.5 - 1j))
    assert abs(lhs) < 1e-12 and abs(rhs) < 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_dirichlet_identity(seed):
    rng = np.random.default_rng(seed)
    g = G.random_min_degree(int(rng.integers(4, 20)), 2, 5, seed=seed)
    f = rng.normal(size=g.vertex_count) + 1j * rng.normal(size=g.vertex_count)
    lhs, rhs = op.dirichlet_checks(g, f)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)


def test_dirichlet_gap_inequality(k4):
    rng = np.random.default_rng(0)
    beta = 8 / 9
    for _ in range(20):
        f = rng.normal(size=4) + 1j * rng.normal(size=4)
        f -= np.dot(k4.degrees, f) / k4.degrees.sum()
        lhs, _ = op.dirichlet_checks(k4, f)
        assert lhs >= beta * op.vertex_norm2(k4, f) - 1e-12


def test_dump_csv(tmp_path, triangle):
    path = tmp_path / "B.csv"
    op.dump_csv(op.nb_B(triangle), path)
    assert np.array_equal(np.loadtxt(path, delimiter=","), op.nb_B(triangle))
