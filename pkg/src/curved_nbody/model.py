"""Unified curved-space n-body model in stereographic coordinates.

Positions live on the stereographic plane of a surface of constant curvature
``kappa``: the sphere of radius ``1/sqrt(kappa)`` for ``kappa > 0``, the
Poincare disk of the hyperboloid for ``kappa < 0`` and the Euclidean plane for
``kappa == 0``.  One set of formulas covers all three cases.

Configurations are flat float arrays ``u = (x_1, y_1, ..., x_n, y_n)``.  The
normalization is fixed: potential coefficient 1/2, conformal factor 4 at the
flat limit and rotation frequency 1 in the rotating frame.
"""
from __future__ import annotations

import numpy as np

from .errors import AntipodalError, CollisionError, DomainError

COLLISION_THRESHOLD = 1e-12
ANTIPODAL_THRESHOLD = 1e-12

__all__ = [
    "as_masses",
    "as_configuration",
    "points",
    "curvature_sign",
    "curvature_radius",
    "rotation_generator",
    "rotate",
    "check_domain",
    "conformal_factor",
    "pair_potential",
    "potential_energy",
    "kinetic_steady",
    "lagrangian_steady",
]


def as_masses(m) -> np.ndarray:
    """Validate and return a mass vector as a float array."""
    m = np.asarray(m, dtype=float).ravel()
    if m.size < 2:
        raise ValueError(f"need at least two bodies, got {m.size}")
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise ValueError(f"masses must be finite and positive, got {m.tolist()}")
    return m


def as_configuration(u, n: int | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    if u.size % 2:
        raise ValueError(f"configuration length must be even, got {u.size}")
    if n is not None and u.size != 2 * n:
        raise ValueError(f"expected {2 * n} coordinates for {n} bodies, got {u.size}")
    if not np.all(np.isfinite(u)):
        raise ValueError("configuration has non-finite entries")
    return u


def points(u) -> np.ndarray:
    """View a flat configuration as an (n, 2) array of points."""
    return np.asarray(u, dtype=float).reshape(-1, 2)


def curvature_sign(kappa: float) -> int:
    if not np.isfinite(kappa):
        raise ValueError(f"curvature must be finite, got {kappa}")
    return int(np.sign(kappa))


def curvature_radius(kappa: float) -> float:
    """Radius ``R = 1/sqrt(|kappa|)`` of the sphere or hyperboloid."""
    if kappa == 0:
        return float("inf")
    return 1.0 / np.sqrt(abs(kappa))


def rotation_generator(u) -> np.ndarray:
    """Infinitesimal rotation of a configuration, ``J u`` with ``J = [[0, -1], [1, 0]]`` per body."""
    p = points(u)
    return np.column_stack((-p[:, 1], p[:, 0])).ravel()


def rotate(u, theta: float) -> np.ndarray:
    """Rigidly rotate every body by ``theta`` about the origin."""
    c, s = np.cos(theta), np.sin(theta)
    p = points(u)
    return np.column_stack((c * p[:, 0] - s * p[:, 1], s * p[:, 0] + c * p[:, 1])).ravel()


def check_domain(u, kappa: float) -> None:
    """Raise if any body sits on or outside the Poincare disk (``kappa < 0`` only)."""
    if kappa >= 0:
        return
    q = 1.0 + kappa * np.sum(points(u) ** 2, axis=1)
    bad = np.flatnonzero(q <= 0)
    if bad.size:
        raise DomainError(
            f"body {int(bad[0])} lies outside the Poincare disk of radius "
            f"{curvature_radius(kappa):.6g} (kappa={kappa})"
        )


def conformal_factor(point, kappa: float) -> float:
    """Metric weight ``4 / (1 + kappa |u|^2)^2`` of the stereographic chart."""
    point = np.asarray(point, dtype=float)
    q = 1.0 + kappa * float(point @ point)
    if q <= 0:
        raise DomainError(f"point {point.tolist()} outside the chart for kappa={kappa}")
    return 4.0 / q**2


def _pair_potential_terms(pj, pk, kappa):
    d = pj - pk
    a = float(d @ d)
    if np.sqrt(a) < COLLISION_THRESHOLD:
        raise CollisionError(f"collision: separation {np.sqrt(a):.3g}")
    sj, sk, dot = float(pj @ pj), float(pk @ pk), float(pj @ pk)
    b = sk * sj * kappa**2 + 2.0 * dot * kappa + 1.0
    if b < ANTIPODAL_THRESHOLD:
        raise AntipodalError(f"bodies (numerically) antipodal: B={b:.3g}")
    num = 4.0 * dot * kappa + (sk * kappa - 1.0) * (sj * kappa - 1.0)
    return num, a, b


def pair_potential(uj, uk, kappa: float) -> float:
    """Mutual potential ``V(u_j, u_k; kappa)`` in the form that is smooth through ``kappa = 0``.

    ``V = N / (2 |u_j - u_k| sqrt(B))`` with
    ``N = 4 (u_j . u_k) kappa + (|u_k|^2 kappa - 1)(|u_j|^2 kappa - 1)`` and
    ``B = |u_j|^2 |u_k|^2 kappa^2 + 2 (u_j . u_k) kappa + 1``.
    At ``kappa = 0`` this is ``1 / (2 |u_j - u_k|)``.
    """
    pj = np.asarray(uj, dtype=float)
    pk = np.asarray(uk, dtype=float)
    num, a, b = _pair_potential_terms(pj, pk, kappa)
    return num / (2.0 * np.sqrt(a * b))


def _pair_arrays(u, kappa):
    """Vectorized pair quantities over ``j < k``; raises on collision or antipodes."""
    p = points(u)
    n = len(p)
    j, k = np.triu_indices(n, 1)
    d = p[j] - p[k]
    a = np.einsum("ij,ij->i", d, d)
    s = np.einsum("ij,ij->i", p, p)
    dot = np.einsum("ij,ij->i", p[j], p[k])
    b = s[j] * s[k] * kappa**2 + 2.0 * dot * kappa + 1.0
    close = np.flatnonzero(np.sqrt(a) < COLLISION_THRESHOLD)
    if close.size:
        pair = (int(j[close[0]]), int(k[close[0]]))
        raise CollisionError(f"collision between bodies {pair}", pair=pair)
    anti = np.flatnonzero(b < ANTIPODAL_THRESHOLD)
    if anti.size:
        pair = (int(j[anti[0]]), int(k[anti[0]]))
        raise AntipodalError(f"bodies {pair} are antipodal (B={b[anti[0]]:.3g})", pair=pair)
    num = 4.0 * dot * kappa + (s[k] * kappa - 1.0) * (s[j] * kappa - 1.0)
    return j, k, p, s, dot, a, b, num


def potential_energy(u, m, kappa: float) -> float:
    """``U = sum_{j<k} m_j m_k V(u_j, u_k; kappa)``."""
    m = np.asarray(m, dtype=float)
    check_domain(u, kappa)
    j, k, _, _, _, a, b, num = _pair_arrays(u, kappa)
    return float(np.sum(m[j] * m[k] * num / (2.0 * np.sqrt(a * b))))


def kinetic_steady(u, m, kappa: float) -> float:
    """Kinetic energy of the rigid rotation with unit frequency, ``1/2 sum m_j lambda_j |u_j|^2``."""
    m = np.asarray(m, dtype=float)
    check_domain(u, kappa)
    s = np.sum(points(u) ** 2, axis=1)
    lam = 4.0 / (1.0 + kappa * s) ** 2
    return float(0.5 * np.sum(m * lam * s))


def lagrangian_steady(u, m, kappa: float) -> float:
    """Steady Lagrangian ``L(u; kappa) = T + U`` whose critical points are relative equilibria."""
    return kinetic_steady(u, m, kappa) + potential_energy(u, m, kappa)
