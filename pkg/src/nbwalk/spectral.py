"""Mixing rates of the simple and the non-backtracking walk.

All spectral quantities are restricted to the mean-zero subspaces: l2_0(V, pi)
for the simple walk and l2_0(B, U) for the non-backtracking walk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from nbwalk.errors import Bipartite, DegreeTooSmall, Disconnected, HypothesesNotMet
from nbwalk.graph import Graph, validate
from nbwalk.operators import nb_S, symmetrised_P

BOUND_SLACK = 1e-10


def _edge_projector(nB: int) -> np.ndarray:
    return np.eye(nB) - np.full((nB, nB), 1.0 / nB)


def beta(g: Graph) -> float:
    """Spectral gap of P^2 on l2_0(V, pi); zero for bipartite graphs."""
    rep = validate(g)
    if not rep.is_connected:
        raise Disconnected()
    if rep.is_bipartite:
        return 0.0
    N = symmetrised_P(g)
    top = np.sqrt(g.degrees.astype(float))
    top /= np.linalg.norm(top)
    lam = np.linalg.eigvalsh(N - np.outer(top, top))
    return float(np.clip(1.0 - np.max(lam**2), 0.0, 1.0))


def c_bound(Dmax: int, beta_value: float) -> float:
    """Explicit lower bound on the non-backtracking gap in terms of Dmax and beta."""
    if Dmax < 3:
        raise DegreeTooSmall(f"Dmax = {Dmax} < 3")
    if not 0.0 <= beta_value <= 1.0:
        raise ValueError(f"beta = {beta_value} outside [0, 1]")
    if beta_value == 0.0:
        return 0.0
    q4 = float(Dmax - 1) ** 4
    a = beta_value / q4
    first = a / (2.0 * (1.0 + a / 6.0) ** 2)
    second = a / (1.0 + 6.0 * q4 / beta_value) ** 2
    return min(first, second)


def _check_gap_input(g: Graph):
    rep = validate(g)
    if not rep.is_connected:
        raise Disconnected()
    if rep.is_bipartite:
        raise Bipartite()


def two_step_gram(g: Graph) -> np.ndarray:
    """(S^2)^T S^2 restricted to mean-zero edge functions (Pi M Pi)."""
    S = nb_S(g, dense=True)
    S2 = S @ S
    Pi = _edge_projector(g.n_directed)
    M = S2.T @ S2
    M = Pi @ M @ Pi
    return 0.5 * (M + M.T)


def nb_gap(g: Graph) -> float:
    """1 - largest eigenvalue of S*^2 S^2 on l2_0(B, U)."""
    _check_gap_input(g)
    lam = np.linalg.eigvalsh(two_step_gram(g))
    return float(np.clip(1.0 - lam[-1], 0.0, 1.0))


def restricted_norm_Sn(g: Graph, n: int) -> float:
    """Operator norm of S^n on l2_0(B, U)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_gap_input(g)
    S = nb_S(g, dense=True)
    Pi = _edge_projector(g.n_directed)
    Sn = np.linalg.matrix_power(S, n)
    return float(np.linalg.norm(Pi @ Sn @ Pi, ord=2))


@dataclass
class SpectralCertificate:
    beta: float
    nb_gap: float
    c_bound: float
    Dmax: int
    corollary_norms: list = field(default_factory=list)

    @property
    def Qmax(self) -> int:
        return self.Dmax - 1

    @property
    def theorem1_holds(self) -> bool:
        return self.nb_gap >= self.c_bound - BOUND_SLACK

    @property
    def corollary_holds(self) -> bool:
        return all(ok for *_, ok in self.corollary_norms)

    @property
    def remark22_holds(self) -> bool:
        # beta >= Dmax^{-2} * nb_gap
        return self.beta >= self.nb_gap / self.Dmax**2 - BOUND_SLACK

    @property
    def all_hold(self) -> bool:
        return self.theorem1_holds and self.corollary_holds and self.remark22_holds

    def as_dict(self) -> dict:
        return {
            "beta": self.beta,
            "nb_gap": self.nb_gap,
            "c_bound": self.c_bound,
            "Dmax": self.Dmax,
            "Qmax": self.Qmax,
            "theorem1_holds": self.theorem1_holds,
            "corollary_norms": [
                {"n": n, "norm": v, "bound": b, "holds": ok} for n, v, b, ok in self.corollary_norms
            ],
            "corollary_holds": self.corollary_holds,
            "remark22_holds": self.remark22_holds,
        }


def certify(g: Graph, n_list=(1, 2, 4, 8)) -> SpectralCertificate:
    """Evaluate the gap theorem, its power-norm corollary and the converse bound on ``g``."""
    rep = validate(g)
    if not rep.meets_gap_hypotheses:
        raise HypothesesNotMet(rep.failed_hypotheses())
    b = beta(g)
    c = c_bound(g.Dmax, b)
    cert = SpectralCertificate(beta=b, nb_gap=nb_gap(g), c_bound=c, Dmax=g.Dmax)
    if n_list:
        S = nb_S(g, dense=True)
        Pi = _edge_projector(g.n_directed)
        power = np.eye(g.n_directed)
        done = 0
        for n in sorted(set(int(k) for k in n_list)):
            if n < 1:
                raise ValueError("powers must be >= 1")
            power = power @ np.linalg.matrix_power(S, n - done)
            done = n
            norm = float(np.linalg.norm(Pi @ power @ Pi, ord=2))
            bound = (1.0 - c) ** (n // 4)
            cert.corollary_norms.append((n, norm, bound, norm <= bound + BOUND_SLACK))
    return cert
