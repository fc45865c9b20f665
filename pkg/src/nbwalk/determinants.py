"""Numerical verification of the determinant identities.

Every determinant is taken from an LU factorisation (``numpy.linalg.slogdet``)
and products over edges/vertices are accumulated as complex logarithms, so the
two sides are compared through their log-ratio and never overflow.

Operators built from the proof of the Green-function identity (intertwining
relation, kernel statements) use the successor form of the Hashimoto matrix,
``Bt = B.T``: (Bt f)(e) = sum of f(e') over e ~> e'. Determinants do not
distinguish B from its transpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from nbwalk.errors import Disconnected, NotRegular, SampleAtPole, SingularFactorization
from nbwalk.graph import Graph, Weights, degree_normalised_weights, validate
from nbwalk.green import ZetaField, solve_zeta
from nbwalk.operators import (
    adjacency,
    laplacian_P,
    nb_B,
    origin_average,
    reversal_matrix,
    schrodinger,
)

DEFAULT_TOL = 1e-8


@dataclass
class DetReport:
    identity: str
    samples: list
    log_lhs: list
    log_rhs: list
    rel_errors: list
    tol: float
    extras: dict = field(default_factory=dict)

    @property
    def lhs(self) -> list:
        return [complex(np.exp(v)) for v in self.log_lhs]

    @property
    def rhs(self) -> list:
        return [complex(np.exp(v)) for v in self.log_rhs]

    @property
    def max_rel_error(self) -> float:
        return float(max(self.rel_errors)) if self.rel_errors else 0.0

    @property
    def worst_sample(self):
        return self.samples[int(np.argmax(self.rel_errors))] if self.rel_errors else None

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_rel_error) and self.max_rel_error < self.tol)

    def as_dict(self) -> dict:
        def c(x):
            return [float(np.real(x)), float(np.imag(x))]

        return {
            "identity": self.identity,
            "samples": [c(s) for s in self.samples],
            "lhs": [c(v) for v in self.lhs],
            "rhs": [c(v) for v in self.rhs],
            "log_lhs": [c(v) for v in self.log_lhs],
            "log_rhs": [c(v) for v in self.log_rhs],
            "rel_errors": [float(r) for r in self.rel_errors],
            "max_rel_error": self.max_rel_error,
            "tol": self.tol,
            "passed": self.passed,
            "extras": self.extras,
        }


def relative_error_log(log_a: complex, log_b: complex) -> float:
    """|a - b| / max(|a|, |b|) for a = exp(log_a), b = exp(log_b)."""
    d = complex(log_b) - complex(log_a)
    if not np.isfinite(d.real) or not np.isfinite(d.imag):
        return float("inf")
    if d.real > 0:
        # |b| > |a|: divide by |b|
        return float(abs(1.0 - np.exp(-d)))
    return float(abs(1.0 - np.exp(d)))


def logdet(M) -> complex:
    """Complex log-determinant from an LU factorisation."""
    sign, logabs = np.linalg.slogdet(np.asarray(M, dtype=complex))
    if sign == 0 or not np.isfinite(logabs):
        raise SingularFactorization("matrix is singular to working precision")
    return complex(np.log(sign) + logabs)


def _logdet_batch(stack: np.ndarray, chunk: int = 64) -> np.ndarray:
    out = np.empty(stack.shape[0], dtype=complex)
    for i in range(0, stack.shape[0], chunk):
        sign, logabs = np.linalg.slogdet(stack[i:i + chunk])
        if np.any(sign == 0):
            raise SingularFactorization("singular sample in batch")
        out[i:i + chunk] = np.log(sign) + logabs
    return out


def _logsum(values) -> complex:
    values = np.asarray(values, dtype=complex)
    return complex(np.sum(np.log(values))) if values.size else 0j


# ---------------------------------------------------------------------------
# the Green-function determinant identity


def thm13_sides(g: Graph, zf: ZetaField, weights: Weights | None = None):
    """Log of both sides of the edge/vertex Green-function determinant identity."""
    if weights is None:
        A = adjacency(g, dense=True)
        Bp = nb_B(g, dense=True)
        p = np.ones(g.n_edges)
    else:
        A, Bp = schrodinger(g, weights, dense=True)
        p = weights.p
    n = g.vertex_count
    log_lhs = _logsum(-zf.Ge / p) + logdet(np.diag(1.0 / zf.zeta) - Bp)
    log_rhs = logdet(zf.z * np.eye(n) - A) + _logsum(-zf.Gv)
    return log_lhs, log_rhs


def thm13_check(g: Graph, z, weights: Weights | None = None, tol: float = DEFAULT_TOL,
                zeta_tol: float = 1e-12, max_iter: int = 100_000, zf: ZetaField | None = None) -> DetReport:
    if zf is None:
        zf = solve_zeta(g, z, weights, tol=zeta_tol, max_iter=max_iter)
    la, lb = thm13_sides(g, zf, weights)
    return DetReport(
        identity="thm13" if weights is None else "thm13_weighted",
        samples=[zf.z],
        log_lhs=[la],
        log_rhs=[lb],
        rel_errors=[relative_error_log(la, lb)],
        tol=tol,
        extras={"iterations": zf.iterations, "fixed_point_residual": zf.residual},
    )


# ---------------------------------------------------------------------------
# Ihara-type identities


def default_u_samples(g: Graph, count: int | None = None, radius: float = 0.5) -> np.ndarray:
    count = 2 * g.n_directed + 1 if count is None else int(count)
    # offset keeps samples off the real axis
    theta = 2 * np.pi * (np.arange(count) + 0.5) / count
    return radius * np.exp(1j * theta)


def _check_poles(g: Graph, u: np.ndarray):
    if g.rank - 1 < 0 and np.any(np.isclose(u**2, 1.0, rtol=0, atol=1e-14)):
        raise SampleAtPole("u^2 = 1 is a pole of (1 - u^2)^(r - 1) when r = 0")


def ihara_check(g: Graph, u_samples=None, tol: float = 1e-9) -> DetReport:
    """det(I - uB) against (1 - u^2)^(r-1) det(I - uA + u^2 Q) at every sample."""
    require_connected(g)
    u = default_u_samples(g) if u_samples is None else np.asarray(u_samples, dtype=complex)
    _check_poles(g, u)
    B = nb_B(g, dense=True)
    A = adjacency(g, dense=True)
    Q = np.diag(g.Q.astype(float))
    IB, IV = np.eye(g.n_directed), np.eye(g.vertex_count)
    left = _logdet_batch(IB[None] - u[:, None, None] * B[None])
    right = _logdet_batch(IV[None] - u[:, None, None] * A[None] + (u**2)[:, None, None] * Q[None])
    right = right + (g.rank - 1) * np.log(1 - u**2)
    return DetReport(
        identity="ihara_general",
        samples=list(u),
        log_lhs=list(left),
        log_rhs=list(right),
        rel_errors=[relative_error_log(a, b) for a, b in zip(left, right)],
        tol=tol,
    )


def ihara_regular_check(g: Graph, u_samples=None, tol: float = 1e-9) -> DetReport:
    """Regular-graph form with (1 + q u^2) I - u A on the right."""
    if not g.is_regular():
        raise NotRegular(f"{g!r} is not regular")
    q = int(g.degrees[0]) - 1
    u = default_u_samples(g) if u_samples is None else np.asarray(u_samples, dtype=complex)
    _check_poles(g, u)
    B = nb_B(g, dense=True)
    A = adjacency(g, dense=True)
    IB, IV = np.eye(g.n_directed), np.eye(g.vertex_count)
    left = _logdet_batch(IB[None] - u[:, None, None] * B[None])
    right = _logdet_batch((1 + q * u**2)[:, None, None] * IV[None] - u[:, None, None] * A[None])
    right = right + (g.rank - 1) * np.log(1 - u**2)
    return DetReport(
        identity="ihara_regular",
        samples=list(u),
        log_lhs=list(left),
        log_rhs=list(right),
        rel_errors=[relative_error_log(a, b) for a, b in zip(left, right)],
        tol=tol,
    )


def regular_reduction_check(g: Graph, z, tol: float = 1e-9, zf: ZetaField | None = None) -> DetReport:
    """Substitute u = zeta into the regular Ihara formula and recover the Green identity.

    zeta is the (constant) fixed-point value; vertex and edge Green functions
    are taken from their closed forms zeta/(zeta^2 - 1) and zeta^2/(zeta^2 - 1).
    The left side is the Green identity's left side with det(zeta^{-1} - B)
    rewritten through the Ihara formula; the right side is det(z - A) prod(-Gv).
    """
    if not g.is_regular():
        raise NotRegular(f"{g!r} is not regular")
    if zf is None:
        zf = solve_zeta(g, z)
    q = int(g.degrees[0]) - 1
    zeta = complex(np.mean(zf.zeta))
    spread = float(np.max(np.abs(zf.zeta - zeta)))
    Gv = zeta / (zeta**2 - 1)
    Ge = zeta**2 / (zeta**2 - 1)
    A = adjacency(g, dense=True)
    nV, nE, nB = g.vertex_count, g.n_edges, g.n_directed
    ihara_right = (g.rank - 1) * np.log(1 - zeta**2) + logdet((1 + q * zeta**2) * np.eye(nV) - zeta * A)
    # det(zeta^{-1} I - B) = zeta^{-|B|} det(I - zeta B)
    log_lhs = nE * np.log(-Ge) - nB * np.log(zeta) + ihara_right
    log_rhs = logdet(zf.z * np.eye(nV) - A) + nV * np.log(-Gv)
    direct_lhs, direct_rhs = thm13_sides(g, zf)
    return DetReport(
        identity="ihara_regular",
        samples=[zf.z],
        log_lhs=[complex(log_lhs)],
        log_rhs=[complex(log_rhs)],
        rel_errors=[relative_error_log(log_lhs, log_rhs)],
        tol=tol,
        extras={
            "route": "regular_reduction",
            "zeta": [zeta.real, zeta.imag],
            "zeta_spread": spread,
            "quadratic_residual": abs(q * zeta + 1 / zeta - zf.z),
            "Gv_closed_form_error": float(np.max(np.abs(zf.Gv - Gv))),
            "Ge_closed_form_error": float(np.max(np.abs(zf.Ge - Ge))),
            "vs_direct_lhs": relative_error_log(log_lhs, direct_lhs),
            "vs_direct_rhs": relative_error_log(log_rhs, direct_rhs),
        },
    )


# ---------------------------------------------------------------------------
# operators from the proof


def successor_B(g: Graph) -> np.ndarray:
    return nb_B(g, dense=True).T


def intertwining_matrices(g: Graph, zf: ZetaField):
    """|V| x |B| matrices H and L with H (zeta^{-1} - Bt) = (A - z) L."""
    two_m = 2.0 * zf.m
    o, t = g.origin, g.terminus
    e = np.arange(g.n_directed)
    H = np.zeros((g.vertex_count, g.n_directed), dtype=complex)
    np.add.at(H, (o, e), -1.0 / two_m[t])
    np.add.at(H, (t, e), zf.zeta / two_m[o])
    L = np.zeros((g.vertex_count, g.n_directed), dtype=complex)
    L[o, e] = 1.0 / two_m[o]
    return H, L


def intertwining_residual(g: Graph, z=None, zf: ZetaField | None = None) -> float:
    if zf is None:
        zf = solve_zeta(g, z)
    H, L = intertwining_matrices(g, zf)
    A = adjacency(g, dense=True)
    left = H @ (np.diag(1.0 / zf.zeta) - successor_B(g))
    right = (A - zf.z * np.eye(g.vertex_count)) @ L
    return float(np.max(np.abs(left - right)))


def K_matrix(g: Graph, zf: ZetaField) -> np.ndarray:
    """K = (2 m_2)^{-1} (iota zeta - I), block diagonal over reversal pairs."""
    two_m = 2.0 * zf.m
    e = np.arange(g.n_directed)
    K = np.zeros((g.n_directed,) * 2, dtype=complex)
    K[e, e] = -1.0 / two_m[g.terminus]
    K[g.reversal, e] = zf.zeta / two_m[g.origin]
    return K


def detK_blocks(g: Graph, zf: ZetaField) -> np.ndarray:
    """Per undirected edge: (2x2 block determinant of K, -Ge)."""
    K = K_matrix(g, zf)
    out = np.empty((g.n_edges, 2), dtype=complex)
    for k in range(g.n_edges):
        idx = [2 * k, 2 * k + 1]
        out[k, 0] = np.linalg.det(K[np.ix_(idx, idx)])
        out[k, 1] = -zf.Ge[k]
    return out


def detK_check(g: Graph, z=None, tol: float = 1e-9, zf: ZetaField | None = None) -> DetReport:
    if zf is None:
        zf = solve_zeta(g, z)
    la = logdet(K_matrix(g, zf))
    lb = _logsum(-zf.Ge)
    blocks = detK_blocks(g, zf)
    block_err = float(np.max(np.abs(blocks[:, 0] - blocks[:, 1]) / np.abs(blocks[:, 1])))
    return DetReport(
        identity="detK",
        samples=[zf.z],
        log_lhs=[la],
        log_rhs=[lb],
        rel_errors=[relative_error_log(la, lb)],
        tol=tol,
        extras={"max_block_rel_error": block_err},
    )


def origin_kernel_basis(g: Graph) -> np.ndarray:
    """Orthonormal basis of edge functions summing to zero over each vertex's out-edges."""
    return scipy.linalg.null_space(origin_average(g, dense=True))


def kernel_characterization_residual(g: Graph) -> float:
    """max |Bt f + iota f| over an orthonormal basis of the origin-sum kernel."""
    N = origin_kernel_basis(g)
    R = reversal_matrix(g, dense=True)
    return float(np.max(np.abs(successor_B(g) @ N + R @ N))) if N.size else 0.0


def kernel_action_residual(g: Graph, z=None, zf: ZetaField | None = None) -> float:
    """max |K (zeta^{-1} - Bt) f + f| over the origin-sum kernel."""
    if zf is None:
        zf = solve_zeta(g, z)
    N = origin_kernel_basis(g)
    if N.size == 0:
        return 0.0
    X = K_matrix(g, zf) @ (np.diag(1.0 / zf.zeta) - successor_B(g)) @ N
    return float(np.max(np.abs(X + N)))


def similarity_check(g: Graph, z) -> float:
    """Relative gap between det(z - A_p) for degree-normalised p and det(z - P)."""
    Ap, _ = schrodinger(g, degree_normalised_weights(g), dense=True)
    n = g.vertex_count
    return relative_error_log(logdet(z * np.eye(n) - Ap), logdet(z * np.eye(n) - laplacian_P(g, dense=True)))


def require_connected(g: Graph):
    if not validate(g).is_connected:
        raise Disconnected()
