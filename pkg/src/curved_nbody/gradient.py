"""Gradient and Hessian of the steady Lagrangian.

The gradient is analytic.  The Hessian is a central finite difference of the
analytic gradient, which is accurate enough for Newton's method because
residuals are always measured on the exact map.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AntipodalError, CollisionError, EigenSolverError
from .model import (
    ANTIPODAL_THRESHOLD,
    COLLISION_THRESHOLD,
    _pair_potential_terms,
    check_domain,
    lagrangian_steady,
    points,
)

GRADIENT_FD_STEP = 1e-6
HESSIAN_FD_STEP = 1e-5
ZERO_EIGENVALUE_RTOL = 1e-6


def _dv_dsecond(pj, pk, sj, dot, a, b, num, kappa):
    """dV/du_k for pair arrays, with ``pj`` the first and ``pk`` the second argument.

    Written as d/du_k [N / (2 sqrt(A B))] with ``A = |u_j - u_k|^2``.
    """
    dn = 4.0 * kappa * pj + 2.0 * kappa * pk * (sj * kappa - 1.0)[..., None]
    sa, sb = np.sqrt(a)[..., None], np.sqrt(b)[..., None]
    ab = (a * b)[..., None]
    d_sqrt_ab = -(pj - pk) * sb / sa + (pk * (sj * kappa**2)[..., None] + pj * kappa) * sa / sb
    return 0.5 * dn * (sa * sb) / ab - 0.5 * num[..., None] / ab * d_sqrt_ab


def grad_pair_potential(uj, uk, kappa: float) -> np.ndarray:
    """Gradient of ``V(u_j, u_k; kappa)`` with respect to the second point ``u_k``."""
    pj = np.asarray(uj, dtype=float)
    pk = np.asarray(uk, dtype=float)
    num, a, b = _pair_potential_terms(pj, pk, kappa)
    return _dv_dsecond(
        pj, pk, np.asarray(pj @ pj), np.asarray(pj @ pk), np.asarray(a), np.asarray(b),
        np.asarray(num), kappa,
    )


def grad_kinetic_steady(u, m, kappa: float) -> np.ndarray:
    """Per body ``m_k lambda_k (u_k - 2 kappa |u_k|^2 u_k / (1 + kappa |u_k|^2))``."""
    m = np.asarray(m, dtype=float)
    check_domain(u, kappa)
    p = points(u)
    s = np.einsum("ij,ij->i", p, p)
    q = 1.0 + kappa * s
    lam = 4.0 / q**2
    return ((m * lam * (1.0 - 2.0 * kappa * s / q))[:, None] * p).ravel()


def grad_potential(u, m, kappa: float) -> np.ndarray:
    """Gradient of ``U``: block ``k`` is ``sum_{j != k} m_k m_j dV(u_j, u_k)/du_k``."""
    m = np.asarray(m, dtype=float)
    check_domain(u, kappa)
    p = points(u)
    n = len(p)
    s = np.einsum("ij,ij->i", p, p)
    # dense (j, k) grid; entry [j, k] is the contribution of body j to body k
    pj, pk = p[:, None, :], p[None, :, :]
    d = pj - pk
    a = np.einsum("jki,jki->jk", d, d)
    off = ~np.eye(n, dtype=bool)
    if np.any(a[off] < COLLISION_THRESHOLD**2):
        jj, kk = np.argwhere((a < COLLISION_THRESHOLD**2) & off)[0]
        pair = (int(min(jj, kk)), int(max(jj, kk)))
        raise CollisionError(f"collision between bodies {pair}", pair=pair)
    dot = p @ p.T
    b = np.outer(s, s) * kappa**2 + 2.0 * dot * kappa + 1.0
    if np.any(b[off] < ANTIPODAL_THRESHOLD):
        jj, kk = np.argwhere((b < ANTIPODAL_THRESHOLD) & off)[0]
        pair = (int(min(jj, kk)), int(max(jj, kk)))
        raise AntipodalError(f"bodies {pair} are antipodal (B={b[jj, kk]:.3g})", pair=pair)
    a[~off] = 1.0
    b[~off] = 1.0
    num = 4.0 * dot * kappa + np.outer(s * kappa - 1.0, s * kappa - 1.0)
    sj = np.broadcast_to(s[:, None], (n, n))
    dv = _dv_dsecond(pj, pk, sj, dot, a, b, num, kappa)
    w = np.outer(m, m) * off
    return np.einsum("jk,jki->ki", w, dv).ravel()


def grad_lagrangian(u, m, kappa: float) -> np.ndarray:
    """Analytic gradient of the steady Lagrangian, ordered ``(dx_1, dy_1, ..., dx_n, dy_n)``."""
    return grad_kinetic_steady(u, m, kappa) + grad_potential(u, m, kappa)


def _default_step(u, base):
    return base * max(1.0, float(np.max(np.abs(u))))


def grad_fd_oracle(u, m, kappa: float, h: float | None = None) -> np.ndarray:
    """Central finite-difference gradient of :func:`lagrangian_steady` (test oracle)."""
    u = np.asarray(u, dtype=float)
    if h is None:
        h = _default_step(u, GRADIENT_FD_STEP)
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    g = np.empty_like(u)
    for i in range(u.size):
        e = np.zeros_like(u)
        e[i] = h
        g[i] = (lagrangian_steady(u + e, m, kappa) - lagrangian_steady(u - e, m, kappa)) / (2 * h)
    return g


def hessian_fd(u, m, kappa: float, h: float | None = None, symmetrize: bool = True) -> np.ndarray:
    """Hessian of the steady Lagrangian by central differences of the analytic gradient."""
    u = np.asarray(u, dtype=float)
    if h is None:
        h = _default_step(u, HESSIAN_FD_STEP)
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    dim = u.size
    H = np.empty((dim, dim))
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = h
        H[:, i] = (grad_lagrangian(u + e, m, kappa) - grad_lagrangian(u - e, m, kappa)) / (2 * h)
    if symmetrize:
        H = 0.5 * (H + H.T)
    return H


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs of a symmetric matrix, sorted by increasing ``|eigenvalue|``."""

    values: np.ndarray
    vectors: np.ndarray  # columns

    def kernel_dimension(self, rtol: float = ZERO_EIGENVALUE_RTOL) -> int:
        scale = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        return int(np.sum(np.abs(self.values) < rtol * scale))


def spectrum(H) -> Spectrum:
    """Symmetric eigendecomposition with eigenvalues ordered by absolute value."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    try:
        w, v = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"symmetric eigensolver did not converge: {exc}") from exc
    order = np.argsort(np.abs(w), kind="stable")
    w, v = w[order], v[:, order]
    scale = max(np.linalg.norm(H, 2), np.finfo(float).tiny)
    resid = np.linalg.norm(H @ v - v * w, axis=0)
    if np.any(resid > 1e-10 * scale):
        raise EigenSolverError(f"eigenpair residual {resid.max():.3g} exceeds 1e-10 * ||H||")
    return Spectrum(w, v)


def restricted_min_abs_eig(H, direction) -> float:
    """Smallest ``|eigenvalue|`` of ``H`` on the orthogonal complement of ``direction``."""
    direction = np.asarray(direction, dtype=float)
    dim = direction.size
    # orthonormal basis of the complement: trailing columns of a full QR
    q, _ = np.linalg.qr(np.column_stack([direction, np.eye(dim)]), mode="complete")
    basis = q[:, 1:dim]
    w = np.linalg.eigvalsh(basis.T @ H @ basis)
    return float(np.min(np.abs(w)))
