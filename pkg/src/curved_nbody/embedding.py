"""Lift stereographic configurations onto the sphere or the hyperboloid.

For curvature ``kappa = sigma / R^2`` the surface is ``x^2 + y^2 + sigma z^2 = sigma R^2``.
The chart is the inverse stereographic projection whose metric weight is
``4 / (1 + kappa |u|^2)^2``:

* sphere (sigma = +1), projecting from the north pole ``(0, 0, R)``::

      (x, y, z) = (2 R^2 u_x, 2 R^2 u_y, R (|u|^2 - R^2)) / (|u|^2 + R^2)

* hyperboloid (sigma = -1), upper sheet, Poincare disk ``|u| < R``::

      (x, y, z) = (2 R^2 u_x, 2 R^2 u_y, R (R^2 + |u|^2)) / (R^2 - |u|^2)
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, FlatCurvatureError, PreconditionError
from .model import curvature_radius, curvature_sign, points


@dataclass(frozen=True)
class EmbeddedConfiguration:
    points: np.ndarray  # (n, 3)
    sigma: int
    radius: float
    kappa: float
    rescaled: bool = False
    reflected: bool = False

    def constraint_residual(self) -> np.ndarray:
        """``x^2 + y^2 + sigma z^2 - sigma R_eff^2`` per body."""
        x, y, z = self.points.T
        r_eff = 1.0 if self.rescaled else self.radius
        return x**2 + y**2 + self.sigma * z**2 - self.sigma * r_eff**2


def embed(u, kappa: float) -> EmbeddedConfiguration:
    if kappa == 0:
        raise FlatCurvatureError("no curved surface to embed into at kappa = 0")
    sigma = curvature_sign(kappa)
    R = curvature_radius(kappa)
    p = points(u)
    s = np.sum(p**2, axis=1)
    R2 = R * R
    if sigma > 0:
        den = s + R2
        z = R * (s - R2) / den
    else:
        if np.any(s >= R2):
            raise DomainError(f"configuration leaves the Poincare disk of radius {R:.6g}")
        den = R2 - s
        z = R * (R2 + s) / den
    xyz = np.column_stack((2.0 * R2 * p[:, 0] / den, 2.0 * R2 * p[:, 1] / den, z))
    return EmbeddedConfiguration(xyz, sigma, R, float(kappa))


def project(ec: EmbeddedConfiguration) -> np.ndarray:
    """Forward stereographic projection back to the plane (inverse of :func:`embed`)."""
    xyz = np.array(ec.points, dtype=float)
    if ec.reflected:
        xyz[:, 2] = -xyz[:, 2]
    R = ec.radius
    if ec.rescaled:
        xyz *= R
    den = R - xyz[:, 2] if ec.sigma > 0 else R + xyz[:, 2]
    return (R * xyz[:, :2] / den[:, None]).ravel()


def rescale_unit(ec: EmbeddedConfiguration, reflect: bool = False) -> EmbeddedConfiguration:
    """Divide by ``R`` so the points lie on the unit sphere/hyperboloid; optionally flip ``z``."""
    if ec.rescaled:
        raise PreconditionError("configuration is already rescaled")
    xyz = ec.points / ec.radius
    if reflect:
        xyz = xyz * np.array([1.0, 1.0, -1.0])
    return replace(ec, points=xyz, rescaled=True, reflected=bool(reflect))


@dataclass(frozen=True)
class LatitudeReport:
    order: np.ndarray  # body indices sorted by increasing mass
    masses: np.ndarray
    z: np.ndarray
    axis_distance: np.ndarray


def latitude_report(ec: EmbeddedConfiguration, masses) -> LatitudeReport:
    """Height and distance to the rotation axis of each body, listed by increasing mass."""
    if not ec.rescaled:
        raise PreconditionError("latitude report expects a rescaled configuration")
    masses = np.asarray(masses, dtype=float)
    order = np.argsort(masses, kind="stable")
    xyz = ec.points[order]
    rho = np.hypot(xyz[:, 0], xyz[:, 1])
    return LatitudeReport(order, masses[order], xyz[:, 2].copy(), rho)
