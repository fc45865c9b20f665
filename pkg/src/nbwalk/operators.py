"""Vertex and directed-edge operators.

Vertex functions live in l2(V, pi) with pi(x) = D(x); edge functions live in
l2(B, U) with the uniform measure. Matrices act on column vectors indexed by
vertex id or directed-edge id (see :mod:`nbwalk.graph`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from nbwalk.errors import BipartiteInput, NotMeanZero
from nbwalk.graph import Graph, Weights, validate

DENSE_LIMIT = 4000
MEAN_ZERO_TOL = 1e-10


def _maybe_sparse(rows, cols, vals, shape, dense=None):
    dense = max(shape) <= DENSE_LIMIT if dense is None else dense
    m = sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
    return m.toarray() if dense else m


def adjacency(g: Graph, dense=None):
    o, t = g.origin, g.terminus
    return _maybe_sparse(o, t, np.ones(g.n_directed), (g.vertex_count,) * 2, dense)


def laplacian_P(g: Graph, dense=None):
    """Simple random walk: Pf(x) = mean of f over the neighbours of x."""
    o, t = g.origin, g.terminus
    return _maybe_sparse(o, t, 1.0 / g.degrees[o], (g.vertex_count,) * 2, dense)


def _nb_pattern(g: Graph):
    """(row, col) pairs with B(e, e') = 1, i.e. e' ~> e."""
    rows, cols = [], []
    for ep in range(g.n_directed):
        for e in g.successors(ep):
            rows.append(e)
            cols.append(ep)
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64)


def nb_B(g: Graph, dense=None):
    """Hashimoto matrix: (Bf)(e) = sum of f(e') over e' ~> e."""
    rows, cols = _nb_pattern(g)
    return _maybe_sparse(rows, cols, np.ones(rows.size), (g.n_directed,) * 2, dense)


def nb_S(g: Graph, dense=None):
    """Non-backtracking transfer operator diag(1/Q(o(e))) B."""
    rows, cols = _nb_pattern(g)
    vals = 1.0 / g.Q[g.origin[rows]]
    return _maybe_sparse(rows, cols, vals, (g.n_directed,) * 2, dense)


def schrodinger(g: Graph, w: Weights, dense=None):
    """Return (A_p + W, B_p) with B_p(e, e') = p(e') on the pattern of B."""
    w.check(g)
    pe = w.directed(g)
    n = g.vertex_count
    idx = np.arange(n)
    rows = np.concatenate([g.origin, idx])
    cols = np.concatenate([g.terminus, idx])
    vals = np.concatenate([pe, w.W])
    H = _maybe_sparse(rows, cols, vals, (n, n), dense)
    r, c = _nb_pattern(g)
    Bp = _maybe_sparse(r, c, pe[c], (g.n_directed,) * 2, dense)
    return H, Bp


def lift_O(g: Graph, dense=None):
    """(O f)(e) = f(o(e)), a |B| x |V| matrix."""
    return _maybe_sparse(np.arange(g.n_directed), g.origin, np.ones(g.n_directed),
                         (g.n_directed, g.vertex_count), dense)


def lift_T(g: Graph, dense=None):
    """(T f)(e) = f(t(e))."""
    return _maybe_sparse(np.arange(g.n_directed), g.terminus, np.ones(g.n_directed),
                         (g.n_directed, g.vertex_count), dense)


def origin_average(g: Graph, dense=None):
    """|V| x |B| averaging map f -> (1/D(x)) sum_{o(e)=x} f(e)."""
    return _maybe_sparse(g.origin, np.arange(g.n_directed), 1.0 / g.degrees[g.origin],
                         (g.vertex_count, g.n_directed), dense)


def reversal_matrix(g: Graph, dense=None):
    return _maybe_sparse(np.arange(g.n_directed), g.reversal, np.ones(g.n_directed),
                         (g.n_directed,) * 2, dense)


def lifts_and_projector(g: Graph, dense=None):
    return lift_O(g, dense), lift_T(g, dense), origin_average(g, dense)


def symmetrised_P(g: Graph) -> np.ndarray:
    """D^{-1/2} A D^{-1/2}, the conjugate of P by D^{1/2}."""
    s = 1.0 / np.sqrt(g.degrees.astype(float))
    return s[:, None] * adjacency(g, dense=True) * s[None, :]


def vertex_norm2(g: Graph, f) -> float:
    return float(np.sum(g.degrees * np.abs(f) ** 2))


def pi_mean_zero_basis(g: Graph) -> np.ndarray:
    """Orthonormal (in l2(V, pi)) basis of the pi-mean-zero vertex functions, |V| x (|V|-1)."""
    d = g.degrees.astype(float)
    # orthonormal complement of sqrt(D) in the Euclidean sense, then undo the weight
    comp = scipy.linalg.null_space(np.sqrt(d)[None, :])
    return comp / np.sqrt(d)[:, None]


# ---------------------------------------------------------------------------
# decomposition of mean-zero edge functions


@dataclass(frozen=True)
class DecompositionReport:
    dim_O: int
    dim_T: int
    dim_H: int
    expected_dim_H: int
    rank_minus_one: int
    orthogonality_residual: float

    @property
    def dims_sum(self) -> int:
        return self.dim_O + self.dim_T + self.dim_H

    def as_dict(self) -> dict:
        return {
            "dim_O": self.dim_O,
            "dim_T": self.dim_T,
            "dim_H": self.dim_H,
            "dims_sum": self.dims_sum,
            "expected_dim_H": self.expected_dim_H,
            "rank_minus_one": self.rank_minus_one,
            "orthogonality_residual": self.orthogonality_residual,
        }


def _require_non_bipartite(g: Graph):
    rep = validate(g)
    if rep.is_bipartite or not rep.is_connected:
        raise BipartiteInput("decomposition needs a connected non-bipartite graph")


def decompose(g: Graph, f):
    """Split a mean-zero edge function as f = F + G + H.

    F depends only on the origin, G only on the terminus (both lifted from
    pi-mean-zero vertex functions), and H sums to zero over the out-edges and
    over the in-edges of every vertex.
    """
    _require_non_bipartite(g)
    f = np.asarray(f, dtype=complex)
    if abs(f.sum()) > MEAN_ZERO_TOL * max(np.linalg.norm(f), 1.0):
        raise NotMeanZero(f"<f, 1>_U = {f.sum():.3e}")
    O, T = lift_O(g, dense=True), lift_T(g, dense=True)
    n = g.vertex_count
    coef, *_ = np.linalg.lstsq(np.hstack([O, T]), f, rcond=None)
    a, b = coef[:n], coef[n:]
    # O1 = T1: move the constant part so both potentials are pi-mean-zero
    d = g.degrees
    c = np.dot(d, a) / d.sum()
    a, b = a - c, b + c
    F, G = O @ a, T @ b
    return F, G, f - F - G


def decomposition_report(g: Graph, tol: float = 1e-9) -> DecompositionReport:
    _require_non_bipartite(g)
    O, T = lift_O(g, dense=True), lift_T(g, dense=True)
    M = pi_mean_zero_basis(g)
    OM, TM = O @ M, T @ M
    dim_O = np.linalg.matrix_rank(OM, tol=tol)
    dim_T = np.linalg.matrix_rank(TM, tol=tol)
    H_basis = scipy.linalg.null_space(np.hstack([O, T]).T, rcond=tol)
    dim_H = H_basis.shape[1]
    ones = np.ones(g.n_directed)
    resid = 0.0
    if dim_H:
        resid = float(max(np.abs(OM.T @ H_basis).max(), np.abs(TM.T @ H_basis).max(),
                          np.abs(ones @ H_basis).max()))
    return DecompositionReport(
        dim_O=int(dim_O),
        dim_T=int(dim_T),
        dim_H=int(dim_H),
        expected_dim_H=2 * g.n_edges - 2 * g.vertex_count + 1,
        rank_minus_one=g.rank - 1,
        orthogonality_residual=resid,
    )


def dirichlet_checks(g: Graph, f):
    """Both sides of the two-step Dirichlet identity.

    lhs = 1/2 sum_x 1/D(x) sum_{y, y' ~ x} |f(y) - f(y')|^2
    rhs = <f, (I - P^2) f> in l2(V, pi)
    """
    f = np.asarray(f, dtype=complex)
    lhs = 0.0
    for x in range(g.vertex_count):
        vals = f[g.neighbors(x)]
        diff = vals[:, None] - vals[None, :]
        lhs += 0.5 * np.sum(np.abs(diff) ** 2) / g.degrees[x]
    P = laplacian_P(g, dense=True)
    rhs = np.vdot(f, g.degrees * (f - P @ (P @ f)))
    return float(lhs), float(rhs.real)


def dump_csv(matrix, path) -> None:
    """Debugging aid: write a dense matrix as CSV (complex entries as a+bj)."""
    m = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    fmt = "%s" if np.iscomplexobj(m) else "%.17g"
    np.savetxt(path, m, delimiter=",", fmt=fmt)
