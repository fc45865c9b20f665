"""Finite simple graphs with an indexed table of directed edges.

Undirected edge ``k`` owns directed edges ``2k`` (min id -> max id) and
``2k + 1`` (its reversal), so reversal is ``e ^ 1``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from nbwalk.errors import (
    DegreeTooSmall,
    Empty,
    GenerationFailure,
    Infeasible,
    Malformed,
    MultiEdge,
    SelfLoop,
    WeightMismatch,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Immutable simple undirected graph.

    Parameters
    ----------
    vertex_count : int
    edges : sequence of (u, v) pairs, one per undirected edge
    min_degree : int
        Smallest admissible vertex degree. The standing assumption for
        cycles-bearing graphs is 2; trees used by the Green-function oracle
        pass 0.
    """

    def __init__(self, vertex_count: int, edges: Iterable[Sequence[int]], min_degree: int = 2):
        n = int(vertex_count)
        seen = set()
        canon = []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise Malformed(f"edge ({u}, {v}) out of range for {n} vertices")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise MultiEdge(f"repeated edge {key}")
            seen.add(key)
            canon.append(key)

        self.vertex_count = n
        self.undirected_edges = _frozen(np.array(canon, dtype=np.int64).reshape(-1, 2))
        m = len(canon)
        origin = np.empty(2 * m, dtype=np.int64)
        terminus = np.empty(2 * m, dtype=np.int64)
        origin[0::2] = self.undirected_edges[:, 0]
        terminus[0::2] = self.undirected_edges[:, 1]
        origin[1::2] = self.undirected_edges[:, 1]
        terminus[1::2] = self.undirected_edges[:, 0]
        self.origin = _frozen(origin)
        self.terminus = _frozen(terminus)
        self.reversal = _frozen(np.arange(2 * m, dtype=np.int64) ^ 1)
        self.degrees = _frozen(np.bincount(origin, minlength=n).astype(np.int64))
        if n and self.degrees.min() < min_degree:
            x = int(np.argmin(self.degrees))
            raise DegreeTooSmall(
                f"vertex {x} has degree {self.degrees[x]} < {min_degree}"
            )
        self._index = {(int(a), int(b)): e for e, (a, b) in enumerate(zip(origin, terminus))}
        out = [[] for _ in range(n)]
        for e in range(2 * m):
            out[origin[e]].append(e)
        self._out = [tuple(es) for es in out]

    # sizes -------------------------------------------------------------
    @property
    def n_edges(self) -> int:
        return len(self.undirected_edges)

    @property
    def n_directed(self) -> int:
        return 2 * self.n_edges

    @property
    def Q(self) -> np.ndarray:
        return self.degrees - 1

    @property
    def Dmax(self) -> int:
        return int(self.degrees.max()) if self.vertex_count else 0

    @property
    def rank(self) -> int:
        return self.n_edges - self.vertex_count + 1

    # lookups -----------------------------------------------------------
    def edge(self, u: int, v: int) -> int:
        """Index of the directed edge u -> v."""
        return self._index[(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._index

    def out_edges(self, x: int) -> tuple:
        return self._out[x]

    def in_edges(self, x: int) -> tuple:
        return tuple(e ^ 1 for e in self._out[x])

    def neighbors(self, x: int) -> list:
        return [int(self.terminus[e]) for e in self._out[x]]

    def successors(self, e: int) -> list:
        """Directed edges e' with e ~> e' (t(e) = o(e'), e' not the reversal of e)."""
        return [f for f in self._out[self.terminus[e]] if f != (e ^ 1)]

    def is_regular(self) -> bool:
        return self.vertex_count > 0 and bool(np.all(self.degrees == self.degrees[0]))

    def is_tree(self) -> bool:
        return self.n_edges == self.vertex_count - 1 and is_connected(self)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.vertex_count == other.vertex_count
            and np.array_equal(self.undirected_edges, other.undirected_edges)
        )

    def __hash__(self):
        return hash((self.vertex_count, self.undirected_edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(|V|={self.vertex_count}, |E|={self.n_edges})"

    def summary(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "edges": self.n_edges,
            "directed_edges": self.n_directed,
            "rank": self.rank,
            "min_degree": int(self.degrees.min()) if self.vertex_count else 0,
            "max_degree": self.Dmax,
        }


@dataclass(frozen=True)
class Weights:
    """Symmetric edge weights ``p`` (one value per undirected edge) and potential ``W``."""

    p: np.ndarray
    W: np.ndarray

    def directed(self, g: Graph) -> np.ndarray:
        """p(e) = p(o(e), t(e)) for every directed edge."""
        return np.repeat(self.p, 2)

    @classmethod
    def unit(cls, g: Graph) -> "Weights":
        return cls(np.ones(g.n_edges), np.zeros(g.vertex_count))

    @classmethod
    def from_triples(cls, g: Graph, triples, W) -> "Weights":
        """Build from ``[u, v, value]`` triples; they must cover exactly the edges of ``g``."""
        p = np.full(g.n_edges, np.nan)
        for u, v, val in triples:
            u, v, val = int(u), int(v), float(val)
            if not g.has_edge(u, v):
                raise WeightMismatch(f"weight given on non-edge ({u}, {v})")
            k = g.edge(u, v) // 2
            if not np.isnan(p[k]) and p[k] != val:
                raise WeightMismatch(f"asymmetric weight on edge ({u}, {v})")
            p[k] = val
        if np.isnan(p).any():
            k = int(np.flatnonzero(np.isnan(p))[0])
            raise WeightMismatch(f"no weight for edge {tuple(g.undirected_edges[k])}")
        if np.any(p == 0):
            raise WeightMismatch("weights must be nonzero on edges")
        W = np.asarray(W, dtype=float)
        if W.shape != (g.vertex_count,):
            raise WeightMismatch(f"potential has length {W.size}, expected {g.vertex_count}")
        return cls(p, W)

    def check(self, g: Graph) -> None:
        if self.p.shape != (g.n_edges,) or self.W.shape != (g.vertex_count,):
            raise WeightMismatch("weights do not match graph")
        if np.any(self.p == 0) or not np.all(np.isfinite(self.p)):
            raise WeightMismatch("weights must be finite and nonzero on edges")

    def to_document(self, g: Graph) -> dict:
        triples = [[int(u), int(v), float(val)] for (u, v), val in zip(g.undirected_edges, self.p)]
        return {"p": triples, "W": [float(w) for w in self.W]}


def load_weights(path, g: Graph) -> Weights:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return Weights.from_triples(g, doc["p"], doc["W"])
    except KeyError as exc:
        raise WeightMismatch(f"weights document lacks entry {exc}") from None


def degree_normalised_weights(g: Graph) -> Weights:
    """p(x, y) = (D(x) D(y))^{-1/2}, W = 0: A_p is then similar to P."""
    d = g.degrees.astype(float)
    u, v = g.undirected_edges.T
    return Weights(1.0 / np.sqrt(d[u] * d[v]), np.zeros(g.vertex_count))


def random_weights(g: Graph, rng: np.random.Generator, p_range=(0.5, 2.0), w_range=(-1.0, 1.0)) -> Weights:
    return Weights(rng.uniform(*p_range, g.n_edges), rng.uniform(*w_range, g.vertex_count))


# ---------------------------------------------------------------------------
# ingestion


def parse_edge_list(text: str, min_degree: int = 2) -> Graph:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise Malformed(f"line {lineno}: expected two vertex ids, got {line!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise Malformed(f"line {lineno}: non-integer token in {line!r}") from None
        if u < 0 or v < 0:
            raise Malformed(f"line {lineno}: negative vertex id")
        if u == v:
            raise SelfLoop(f"line {lineno}: self-loop at vertex {u}")
        pairs.append((u, v))
    if not pairs:
        raise Empty("edge list contains no edges")
    ids = sorted({x for pair in pairs for x in pair})
    relabel = {x: i for i, x in enumerate(ids)}
    return Graph(len(ids), [(relabel[u], relabel[v]) for u, v in pairs], min_degree=min_degree)


def read_edge_list(path, min_degree: int = 2) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"), min_degree=min_degree)


def serialize_edge_list(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.undirected_edges)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    is_simple: bool
    is_connected: bool
    is_bipartite: bool
    min_degree: int

    @property
    def meets_gap_hypotheses(self) -> bool:
        return self.is_connected and not self.is_bipartite and self.min_degree >= 3

    def failed_hypotheses(self) -> list:
        failed = []
        if not self.is_connected:
            failed.append("connected")
        if self.is_bipartite:
            failed.append("non-bipartite")
        if self.min_degree < 3:
            failed.append("min-degree-3")
        return failed

    def as_dict(self) -> dict:
        return {
            "is_simple": self.is_simple,
            "is_connected": self.is_connected,
            "is_bipartite": self.is_bipartite,
            "min_degree": self.min_degree,
            "meets_gap_hypotheses": self.meets_gap_hypotheses,
        }


def _two_colour(g: Graph):
    """BFS colouring of every component. Returns (colours, component count, bipartite)."""
    colour = np.full(g.vertex_count, -1)
    components = 0
    bipartite = True
    for s in range(g.vertex_count):
        if colour[s] >= 0:
            continue
        components += 1
        colour[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.neighbors(x):
                if colour[y] < 0:
                    colour[y] = 1 - colour[x]
                    queue.append(y)
                elif colour[y] == colour[x]:
                    bipartite = False
    return colour, components, bipartite


def is_connected(g: Graph) -> bool:
    return _two_colour(g)[1] <= 1


def is_bipartite(g: Graph) -> bool:
    return _two_colour(g)[2]


def validate(g: Graph) -> ValidationReport:
    _, components, bipartite = _two_colour(g)
    return ValidationReport(
        is_simple=True,  # enforced at construction
        is_connected=components <= 1,
        is_bipartite=bipartite,
        min_degree=int(g.degrees.min()) if g.vertex_count else 0,
    )


# ---------------------------------------------------------------------------
# generators


def cycle(n: int) -> Graph:
    if n < 3:
        raise Infeasible("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    if n < 3:
        raise Infeasible("complete graph needs n >= 3 for minimum degree 2")
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def path_tree(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)], min_degree=0)


def star(k: int) -> Graph:
    return Graph(k + 1, [(0, i) for i in range(1, k + 1)], min_degree=0)


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform labelled tree via a Pruefer sequence."""
    if n <= 2:
        return path_tree(n)
    seq = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=int)
    np.add.at(degree, seq, 1)
    edges = []
    for x in seq:
        leaf = int(np.flatnonzero(degree == 1)[0])
        edges.append((leaf, int(x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = np.flatnonzero(degree == 1)
    edges.append((int(u), int(v)))
    return Graph(n, edges, min_degree=0)


def _pair_stubs(degrees: Sequence[int], rng: np.random.Generator, attempts: int):
    """Configuration-model pairing with loop/multi-edge rejection.

    Bad pairs are returned to the stub pool and re-shuffled; an attempt is
    abandoned when the remaining stubs can no longer form a simple pairing.
    """
    n = len(degrees)
    base = np.repeat(np.arange(n), degrees)
    for _ in range(attempts):
        edges = set()
        stubs = base.copy()
        while stubs.size:
            rng.shuffle(stubs)
            leftover = []
            for a, b in stubs.reshape(-1, 2):
                a, b = int(min(a, b)), int(max(a, b))
                if a != b and (a, b) not in edges:
                    edges.add((a, b))
                else:
                    leftover += [a, b]
            if len(leftover) == stubs.size:
                break
            stubs = np.array(leftover, dtype=np.int64)
            if stubs.size and not _pairable(stubs, edges):
                break
        else:
            return sorted(edges)
    raise GenerationFailure(f"no simple pairing found in {attempts} attempts")


def _pairable(stubs: np.ndarray, edges: set) -> bool:
    verts = np.unique(stubs)
    for i, a in enumerate(verts):
        for b in verts[i + 1:]:
            if (int(a), int(b)) not in edges:
                return True
    return False


def random_regular(n: int, d: int, seed: int, attempts: int = 1000) -> Graph:
    if (n * d) % 2 or not 2 <= d < n:
        raise Infeasible(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    return Graph(n, _pair_stubs([d] * n, rng, attempts))


def random_min_degree(n: int, dmin: int, dmax: int, seed: int, attempts: int = 1000) -> Graph:
    """Random graph with every degree in [dmin, dmax].

    A degree sequence is drawn uniformly from the window (one entry is nudged
    to make the sum even) and realised by the pairing model; sequences that
    fail to pair are redrawn.
    """
    if dmin < 2 or dmax < dmin or dmin >= n:
        raise Infeasible(f"degree window [{dmin}, {dmax}] infeasible on {n} vertices")
    hi = min(dmax, n - 1)
    if dmin == hi and (n * dmin) % 2:
        raise Infeasible(f"{n} vertices of degree {dmin} have odd degree sum")
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        degrees = rng.integers(dmin, hi + 1, size=n)
        if degrees.sum() % 2:
            movable = np.flatnonzero(degrees < hi)
            if movable.size == 0:
                movable = np.flatnonzero(degrees > dmin)
                if movable.size == 0:
                    continue
                degrees[rng.choice(movable)] -= 1
            else:
                degrees[rng.choice(movable)] += 1
        try:
            return Graph(n, _pair_stubs(degrees, rng, 20))
        except GenerationFailure:
            continue
    raise GenerationFailure(f"degree window [{dmin}, {dmax}] not realised in {attempts} draws")


FAMILIES = {
    "cycle": (cycle, 1),
    "complete": (complete, 1),
    "random_regular": (random_regular, 2),
    "random_min_degree": (random_min_degree, 3),
    "petersen": (petersen, 0),
}


def generate(family: str, *params: int, seed: int = 0) -> Graph:
    """Build a member of a named family; random families are deterministic in ``seed``."""
    try:
        builder, arity = FAMILIES[family]
    except KeyError:
        raise Malformed(f"unknown family {family!r}; known: {sorted(FAMILIES)}") from None
    if len(params) != arity:
        raise Malformed(f"family {family!r} takes {arity} integer parameters, got {len(params)}")
    if family.startswith("random"):
        return builder(*params, seed=seed)
    return builder(*params)


def parse_family(spec: str) -> tuple:
    """``"random_regular:10:3"`` or ``"random_regular 10 3"`` -> ("random_regular", (10, 3))."""
    parts = spec.replace(":", " ").replace(",", " ").split()
    if not parts:
        raise Malformed("empty generator spec")
    try:
        params = tuple(int(p) for p in parts[1:])
    except ValueError:
        raise Malformed(f"non-integer parameter in generator spec {spec!r}") from None
    return parts[0], params
