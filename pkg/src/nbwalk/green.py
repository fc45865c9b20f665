"""Green functions of the universal-cover tree, computed on the finite graph.

For ``z`` in the upper half-plane and a directed edge e = (w, v), ``zeta[e]``
is minus the diagonal Green function at v of the cover tree with the branch
through w removed. It is the fixed point of

    zeta(w, v) = 1 / (z - W(v) - sum_{u ~ v, u != w} p(v, u)^2 zeta(v, u)),

iterated synchronously from zeta = 1/z. Vertex and edge Green functions follow:

    2 m(v) = z - W(v) - sum_{u ~ v} p(v, u)^2 zeta(v, u),   Gv = -1 / (2 m),
    Ge(w, v) = p(w, v) zeta(w, v) Gv(w).

With p = 1 and W = 0 this is the plain adjacency operator on the tree.

The module also carries the independent oracles: dense or sparse inversion on
finite trees, and truncated universal covers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from nbwalk.errors import (
    InconsistentField,
    NonConvergence,
    NotATree,
    PathNotAdmissible,
    SingularMatrix,
    SpectralParameterNotInUpperHalfPlane,
)
from nbwalk.graph import Graph, Weights
from nbwalk.operators import nb_B, schrodinger

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
REVERSAL_TOL = 1e-8


@dataclass(frozen=True)
class ZetaField:
    z: complex
    zeta: np.ndarray  # per directed edge
    m: np.ndarray  # per vertex
    Gv: np.ndarray  # per vertex
    Ge: np.ndarray  # per undirected edge
    weights: Weights | None
    iterations: int
    final_update_norm: float
    residual: float

    @property
    def two_m(self) -> np.ndarray:
        return 2.0 * self.m

    def Ge_directed(self) -> np.ndarray:
        return np.repeat(self.Ge, 2)

    def herglotz_ok(self) -> bool:
        return bool(np.all(self.Gv.imag > 0) and np.all(self.zeta.imag < 0))

    def tables(self, g: Graph) -> dict:
        return {
            "zeta": [
                {"from": int(w), "to": int(v), "value": _c(val)}
                for w, v, val in zip(g.origin, g.terminus, self.zeta)
            ],
            "m": [_c(val) for val in self.m],
            "Gv": [_c(val) for val in self.Gv],
            "Ge": [
                {"edge": [int(u), int(v)], "value": _c(val)}
                for (u, v), val in zip(g.undirected_edges, self.Ge)
            ],
        }


def _c(x) -> list:
    return [float(np.real(x)), float(np.imag(x))]


def _check_z(z) -> complex:
    z = complex(z)
    if not z.imag > 0:
        raise SpectralParameterNotInUpperHalfPlane(f"Im z must be > 0, got z = {z}")
    return z


def _weights_or_unit(g: Graph, weights: Weights | None) -> Weights:
    if weights is None:
        return Weights.unit(g)
    weights.check(g)
    return weights


def _successor_matrix(g: Graph, p2: np.ndarray) -> sp.csr_matrix:
    """Row e holds p(f)^2 at every successor f of e (e ~> f)."""
    rows, cols = [], []
    for e in range(g.n_directed):
        for f in g.successors(e):
            rows.append(e)
            cols.append(f)
    rows = np.array(rows, dtype=np.int64)
    cols = np.array(cols, dtype=np.int64)
    return sp.csr_matrix((p2[cols], (rows, cols)), shape=(g.n_directed,) * 2)


def _out_sum_matrix(g: Graph, p2: np.ndarray) -> sp.csr_matrix:
    """Row x holds p(e)^2 at every out-edge e of x."""
    e = np.arange(g.n_directed)
    return sp.csr_matrix((p2, (g.origin, e)), shape=(g.vertex_count, g.n_directed))


def solve_zeta(g: Graph, z, weights: Weights | None = None,
               tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> ZetaField:
    z = _check_z(z)
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = _weights_or_unit(g, weights)
    p2 = w.directed(g) ** 2
    succ = _successor_matrix(g, p2)
    shift = z - w.W[g.terminus]

    zeta = np.full(g.n_directed, 1.0 / z, dtype=complex)
    update = np.inf
    it = 0
    while it < max_iter:
        it += 1
        new = 1.0 / (shift - succ @ zeta)
        update = float(np.max(np.abs(new - zeta))) if zeta.size else 0.0
        zeta = new
        if update < tol:
            break
    else:
        raise NonConvergence(it, update)
    return _assemble(g, z, zeta, weights, it, update)


def _assemble(g: Graph, z: complex, zeta: np.ndarray, weights: Weights | None,
              iterations: int, update: float) -> ZetaField:
    w = _weights_or_unit(g, weights)
    pe = w.directed(g)
    two_m = z - w.W - _out_sum_matrix(g, pe**2) @ zeta
    Gv = -1.0 / two_m
    Ge_dir = pe * zeta * Gv[g.origin]
    fwd, bwd = Ge_dir[0::2], Ge_dir[1::2]
    scale = np.maximum(np.abs(fwd), np.abs(bwd))
    if fwd.size and np.any(np.abs(fwd - bwd) > REVERSAL_TOL * np.maximum(scale, 1e-300)):
        k = int(np.argmax(np.abs(fwd - bwd) / np.maximum(scale, 1e-300)))
        raise InconsistentField(
            f"edge {tuple(g.undirected_edges[k])}: Ge {fwd[k]} vs reversed {bwd[k]}"
        )
    zf = ZetaField(z=z, zeta=zeta, m=two_m / 2.0, Gv=Gv, Ge=fwd.copy(), weights=weights,
                   iterations=iterations, final_update_norm=update, residual=np.nan)
    return _with_residual(zf, g)


def _with_residual(zf: ZetaField, g: Graph) -> ZetaField:
    return replace(zf, residual=lemma_residuals(zf, g))


def lemma_residuals(zf: ZetaField, g: Graph) -> float:
    """Largest residual over the vertex, edge and both reversal identities."""
    w = _weights_or_unit(g, zf.weights)
    p2 = w.directed(g) ** 2
    z, zeta, two_m = zf.z, zf.zeta, 2.0 * zf.m
    if zeta.size == 0:
        return float(np.max(np.abs(z - w.W - two_m), initial=0.0))
    out_sum = _out_sum_matrix(g, p2) @ zeta
    vertex = z - w.W - out_sum - two_m
    # sum over u ~ v, u != w of p^2 zeta(v, u) is the out-sum at v minus the reversed edge
    v = g.terminus
    rev = g.reversal
    edge = z - w.W[v] - (out_sum[v] - p2[rev] * zeta[rev]) - 1.0 / zeta
    ratio = zeta - (zf.m[g.origin] / zf.m[v]) * zeta[rev]
    diff = 1.0 / zeta - p2[rev] * zeta[rev] - two_m[v]
    return float(max(np.abs(vertex).max(), np.abs(edge).max(),
                     np.abs(ratio).max(), np.abs(diff).max()))


def perturbed(zf: ZetaField, g: Graph, e: int, factor: complex) -> ZetaField:
    """Copy of ``zf`` with one zeta entry scaled; m, G are left untouched."""
    zeta = zf.zeta.copy()
    zeta[e] *= factor
    return _with_residual(replace(zf, zeta=zeta), g)


def path_products(zf: ZetaField, g: Graph, path) -> tuple:
    """The two product expressions for G(v_0, v_k) along a non-backtracking path."""
    path = [int(v) for v in path]
    fwd = np.prod([zf.zeta[g.edge(path[j], path[j + 1])] for j in range(len(path) - 1)])
    bwd = np.prod([zf.zeta[g.edge(path[j + 1], path[j])] for j in range(len(path) - 1)])
    return -bwd / (2.0 * zf.m[path[-1]]), -fwd / (2.0 * zf.m[path[0]])


# ---------------------------------------------------------------------------
# finite trees and truncated covers


@dataclass(frozen=True)
class CoverTree:
    """Ball of radius ``depth`` in the universal cover, rooted at a lift of ``root``."""

    tree: Graph
    projection: np.ndarray  # tree vertex -> base vertex
    parent: np.ndarray  # -1 at the root
    level: np.ndarray
    is_leaf: np.ndarray
    root: int

    def lifted_weights(self, g: Graph, weights: Weights | None) -> Weights | None:
        if weights is None:
            return None
        proj = self.projection
        p = np.array([weights.p[g.edge(int(proj[a]), int(proj[b])) // 2]
                      for a, b in self.tree.undirected_edges])
        return Weights(p, weights.W[proj])

    def root_children(self) -> np.ndarray:
        return np.flatnonzero(self.parent == 0)


def truncated_cover(g: Graph, root: int, depth: int) -> CoverTree:
    """Tree of non-backtracking paths of length <= depth starting at ``root``."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    proj = [root]
    parent = [-1]
    level = [0]
    edges = []
    queue = deque([0])
    while queue:
        node = queue.popleft()
        if level[node] == depth:
            continue
        x = proj[node]
        came_from = proj[parent[node]] if parent[node] >= 0 else None
        for y in g.neighbors(x):
            if y == came_from:
                continue
            child = len(proj)
            proj.append(y)
            parent.append(node)
            level.append(level[node] + 1)
            edges.append((node, child))
            queue.append(child)
    tree = Graph(len(proj), edges, min_degree=0)
    level = np.array(level)
    return CoverTree(
        tree=tree,
        projection=np.array(proj),
        parent=np.array(parent),
        level=level,
        is_leaf=level == depth,
        root=root,
    )


def _require_tree(t: Graph):
    if not t.is_tree():
        raise NotATree(f"{t!r} is not a tree")


def _shifted_operator(t: Graph, weights: Weights | None, z: complex) -> sp.csc_matrix:
    if weights is None:
        H = sp.csr_matrix((np.ones(t.n_directed), (t.origin, t.terminus)),
                          shape=(t.vertex_count,) * 2)
    else:
        H, _ = schrodinger(t, weights, dense=False)
    return (H - z * sp.identity(t.vertex_count, format="csr")).tocsc().astype(complex)


def _component_without(t: Graph, v: int, w: int) -> np.ndarray:
    """Vertices reachable from v once the edge {v, w} is cut."""
    seen = {v}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in t.neighbors(x):
            if y not in seen and not (x == v and y == w):
                seen.add(y)
                queue.append(y)
    return np.array(sorted(seen))


def branch_zeta(t: Graph, w: int, v: int, z, weights: Weights | None = None,
                operator: sp.csc_matrix | None = None) -> complex:
    """-G(v, v; z) on the tree with the branch from v through w deleted (sparse solve)."""
    z = _check_z(z)
    M = _shifted_operator(t, weights, z) if operator is None else operator
    keep = _component_without(t, v, w)
    sub = M[keep][:, keep]
    rhs = np.zeros(keep.size, dtype=complex)
    loc = int(np.searchsorted(keep, v))
    rhs[loc] = 1.0
    sol = spla.splu(sub.tocsc()).solve(rhs)
    return complex(-sol[loc])


@dataclass(frozen=True)
class TreeGreen:
    G: np.ndarray  # |V| x |V| resolvent (H - z)^{-1}
    zeta: np.ndarray  # per directed edge
    m: np.ndarray  # per vertex


def tree_green_oracle(t: Graph, z, weights: Weights | None = None) -> TreeGreen:
    """Exact Green functions of a finite tree by direct inversion."""
    _require_tree(t)
    z = _check_z(z)
    M = _shifted_operator(t, weights, z)
    G = np.linalg.inv(M.toarray())
    zeta = np.array([branch_zeta(t, int(a), int(b), z, weights, operator=M)
                     for a, b in zip(t.origin, t.terminus)], dtype=complex)
    m = -1.0 / (2.0 * np.diag(G))
    return TreeGreen(G=G, zeta=zeta, m=m)


def cover_root_zeta(g: Graph, root: int, depth: int, z, weights: Weights | None = None):
    """Oracle zeta on the root edges of a truncated cover.

    Returns {directed edge index of g: value} for every edge with an endpoint
    at ``root``; both orientations are computed on the truncated tree.
    """
    z = _check_z(z)
    cov = truncated_cover(g, root, depth)
    tw = cov.lifted_weights(g, weights)
    M = _shifted_operator(cov.tree, tw, z)
    out = {}
    for c in cov.root_children():
        y = int(cov.projection[c])
        out[g.edge(y, root)] = branch_zeta(cov.tree, int(c), 0, z, tw, operator=M)
        out[g.edge(root, y)] = branch_zeta(cov.tree, 0, int(c), z, tw, operator=M)
    return out


def _nb_path_exists(t: Graph, e_from: int, e_to: int) -> bool:
    """True if e_from ~> ... ~> e_to along a non-backtracking walk."""
    seen = {e_from}
    queue = deque([e_from])
    while queue:
        e = queue.popleft()
        if e == e_to:
            return True
        for f in t.successors(e):
            if f not in seen:
                seen.add(f)
                queue.append(f)
    return False


def resolvent_series_check(t: Graph, z, e: int, e_prime: int, tol: float = DEFAULT_TOL):
    """Compare delta_{x=y} + (zeta^{-1} - B)^{-1}(e, e') with -2 m(x) (A - z)^{-1}(x, y).

    Here x = o(e') and y = t(e). On a tree the left side is a finite
    sum over non-backtracking paths from e' to e, so the comparison is only
    meaningful when x = y or such a path exists.
    """
    _require_tree(t)
    z = _check_z(z)
    x, y = int(t.origin[e_prime]), int(t.terminus[e])
    if x != y and not _nb_path_exists(t, e_prime, e):
        raise PathNotAdmissible(f"no non-backtracking path from edge {e_prime} to edge {e}")
    zf = solve_zeta(t, z, tol=tol)
    B = nb_B(t, dense=True)
    M = np.diag(1.0 / zf.zeta) - B
    A_z = _shifted_operator(t, None, z).toarray()
    try:
        left = np.linalg.solve(M, np.eye(t.n_directed)[:, e_prime])[e]
        right_col = np.linalg.solve(A_z, np.eye(t.vertex_count)[:, y])
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from None
    lhs = complex((1.0 if x == y else 0.0) + left)
    rhs = complex(-2.0 * zf.m[x] * right_col[x])
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return lhs, rhs, rel
