"""Planar central configurations used as continuation seeds."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .continuation import AugmentedState, PhaseAnchor, newton_solve
from .errors import ConvergenceError, PreconditionError
from .gradient import ZERO_EIGENVALUE_RTOL, grad_lagrangian, hessian_fd, spectrum
from .model import as_configuration, as_masses, points, rotation_generator

ALIGNMENT_MIN = 0.999


@dataclass
class SeedReport:
    configuration: np.ndarray
    masses: np.ndarray
    residual: float
    hessian_spectrum: list[float] = field(default_factory=list)
    kernel_dimension: int = 0
    degenerate: bool = True
    kernel_alignment: float = float("nan")
    kind: str = "custom"
    routh_beta: float | None = None
    iterations: int = 0

    @property
    def circumradius(self) -> float:
        """Largest distance from the vertex centroid (the true circumradius for regular shapes)."""
        p = points(self.configuration)
        return float(np.max(np.linalg.norm(p - p.mean(axis=0), axis=1)))


def polygon_cc(n: int) -> np.ndarray:
    """Regular n-gon central configuration for unit masses.

    Radius ``r = (1/2) s1**(1/3)`` with ``s1 = (1/4) sum_{j=1}^{n-1} 1/sin(j pi / n)``.
    """
    if n < 2:
        raise ValueError(f"polygon needs n >= 2, got {n}")
    s1 = 0.25 * sum(1.0 / np.sin(j * np.pi / n) for j in range(1, n))
    r = 0.5 * s1 ** (1.0 / 3.0)
    t = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack((r * np.cos(t), r * np.sin(t))).ravel()


def lagrange_triangle(m1: float, m2: float, m3: float) -> np.ndarray:
    """Equilateral central configuration of three arbitrary positive masses.

    With the centre of mass at the origin, each body satisfies
    ``sum_k m_k (a_j - a_k) = M a_j``; equal sides ``d`` then turn the central
    configuration equations into ``4 = M / (2 d^3)``, i.e. ``d = (M / 8)**(1/3)``.
    """
    m = as_masses([m1, m2, m3])
    d = (m.sum() / 8.0) ** (1.0 / 3.0)
    p = np.array([[0.0, 0.0], [d, 0.0], [0.5 * d, 0.5 * d * np.sqrt(3.0)]])
    p -= (m[:, None] * p).sum(axis=0) / m.sum()
    return p.ravel()


def routh_beta(m1: float, m2: float, m3: float) -> float:
    """Routh's mass parameter ``27 (m1 m2 + m1 m3 + m2 m3) / M^2`` (informational only)."""
    return 27.0 * (m1 * m2 + m1 * m3 + m2 * m3) / (m1 + m2 + m3) ** 2


def kernel_report(H, a, tol_zero: float = ZERO_EIGENVALUE_RTOL) -> tuple[list[float], int, float]:
    """Spectrum, kernel dimension and alignment of the near-kernel vector with ``J a``.

    The alignment is ``|cos|`` of the angle between the smallest-``|lambda|``
    eigenvector and ``J a``; it is only meaningful for a one-dimensional kernel
    and is NaN otherwise.
    """
    spect = spectrum(H)
    dim = spect.kernel_dimension(tol_zero)
    align = float("nan")
    if dim == 1:
        ja = rotation_generator(a)
        v = spect.vectors[:, 0]
        align = abs(float(v @ ja)) / (np.linalg.norm(v) * np.linalg.norm(ja))
    return spect.values.tolist(), dim, align


def check_nondegeneracy(a, m, tol_zero: float = ZERO_EIGENVALUE_RTOL) -> SeedReport:
    """Non-degeneracy test of a planar central configuration.

    The Hessian of the flat steady Lagrangian must have exactly one zero
    eigenvalue (relative to the largest) whose eigenvector is the rotation
    generator ``J a``.
    """
    m = as_masses(m)
    a = as_configuration(a, len(m))
    residual = float(np.max(np.abs(grad_lagrangian(a, m, 0.0))))
    if residual >= 1e-10:
        raise PreconditionError(f"not a central configuration: max|grad L| = {residual:.3g}")
    values, dim, align = kernel_report(hessian_fd(a, m, 0.0), a, tol_zero)
    degenerate = dim != 1 or not align > ALIGNMENT_MIN
    beta = routh_beta(*m) if len(m) == 3 else None
    return SeedReport(a, m, residual, values, dim, degenerate, align, routh_beta=beta)


def refine_cc(u0, m, tol: float = 1e-13, max_iters: int = 50) -> SeedReport:
    """Newton-refine a guess into a central configuration and report its non-degeneracy.

    The guess also serves as the phase anchor, so the result is the member of
    the rotation orbit lying on the section through ``u0``.
    """
    m = as_masses(m)
    u0 = as_configuration(u0, len(m))
    anchor = PhaseAnchor.from_configuration(u0)
    try:
        state, rep = newton_solve(AugmentedState(u0, 0.0), m, 0.0, anchor, tol=tol, max_iters=max_iters)
    except ConvergenceError as exc:
        raise ConvergenceError(f"central-configuration refinement failed: {exc}",
                               last=exc.last, history=exc.history) from exc
    if abs(state.alpha) >= 1e-10:
        raise ConvergenceError(f"refined state has alpha={state.alpha:.3g}", last=state.as_vector())
    report = check_nondegeneracy(state.u, m)
    report.iterations = rep.iterations
    return report


def polygon_seed(n: int) -> SeedReport:
    a = polygon_cc(n)
    report = check_nondegeneracy(a, np.ones(n))
    report.kind = f"polygon{n}"
    return report


def lagrange_seed(m1: float, m2: float, m3: float) -> SeedReport:
    report = check_nondegeneracy(lagrange_triangle(m1, m2, m3), [m1, m2, m3])
    report.kind = "lagrange3"
    return report
