"""Equations of motion in the frame rotating with unit angular velocity.

With inertial positions ``z_j = exp(i t) u_j`` the Lagrangian is

    L(u, v) = 1/2 sum_j m_j lambda(u_j) |v_j + J u_j|^2 + U(u)

and Euler-Lagrange gives, per body, with ``w_j = v_j + J u_j``::

    d/dt [lambda_j w_j] = 1/2 grad(lambda_j) |w_j|^2 - lambda_j J w_j + grad_j(U) / m_j

A relative equilibrium is a rest point ``(u*, 0)`` of this flow.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853, OdeSolution

from .errors import DomainError, IntegrationError
from .gradient import grad_potential
from .model import check_domain, points, potential_energy


@dataclass(frozen=True)
class PhaseState:
    u: np.ndarray
    v: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate((self.u, self.v))

    @classmethod
    def from_vector(cls, y) -> "PhaseState":
        y = np.asarray(y, dtype=float)
        half = y.size // 2
        return cls(y[:half].copy(), y[half:].copy())


def _rot(p):
    return np.column_stack((-p[:, 1], p[:, 0]))


def _lambda_terms(p, kappa):
    s = np.sum(p**2, axis=1)
    q = 1.0 + kappa * s
    if np.any(q <= 0):
        raise DomainError(f"body outside the Poincare disk for kappa={kappa}")
    lam = 4.0 / q**2
    grad_lam = (-4.0 * kappa * lam / q)[:, None] * p
    return lam, grad_lam


def lagrangian_full(u, v, m, kappa: float) -> float:
    """Rotating-frame Lagrangian ``T(u, v) + U(u)``."""
    m = np.asarray(m, dtype=float)
    p, pv = points(u), points(v)
    lam, _ = _lambda_terms(p, kappa)
    w = pv + _rot(p)
    return float(0.5 * np.sum(m * lam * np.sum(w**2, axis=1))) + potential_energy(u, m, kappa)


def jacobi_constant(u, v, m, kappa: float) -> float:
    """Conserved energy ``T2 - T0 - U``: velocity-quadratic part minus the velocity-free part."""
    m = np.asarray(m, dtype=float)
    p, pv = points(u), points(v)
    lam, _ = _lambda_terms(p, kappa)
    t2 = 0.5 * np.sum(m * lam * np.sum(pv**2, axis=1))
    t0 = 0.5 * np.sum(m * lam * np.sum(p**2, axis=1))
    return float(t2 - t0 - potential_energy(u, m, kappa))


def eom_rhs(state: PhaseState, m, kappa: float) -> PhaseState:
    """Time derivative ``(du/dt, dv/dt)`` of a rotating-frame phase state."""
    m = np.asarray(m, dtype=float)
    check_domain(state.u, kappa)
    p, pv = points(state.u), points(state.v)
    lam, grad_lam = _lambda_terms(p, kappa)
    w = pv + _rot(p)
    force = points(grad_potential(state.u, m, kappa)) / m[:, None]
    # d/dt(lambda w) = (grad_lam . v) w + lambda (a + J v)
    rhs = (
        0.5 * grad_lam * np.sum(w**2, axis=1)[:, None]
        - lam[:, None] * _rot(w)
        + force
        - np.sum(grad_lam * pv, axis=1)[:, None] * w
    )
    acc = rhs / lam[:, None] - _rot(pv)
    return PhaseState(np.asarray(state.v, dtype=float).copy(), acc.ravel())


@dataclass
class Trajectory:
    t: np.ndarray  # accepted step times
    y: np.ndarray  # (len(t), 4n) states at those times
    solution: OdeSolution | None

    def __call__(self, t) -> np.ndarray:
        """States at arbitrary times via the dense interpolant, shape ``(len(t), 4n)``."""
        if self.solution is None:
            raise ValueError("no dense output available")
        return np.atleast_2d(self.solution(np.atleast_1d(t)).T)


def integrate(s0: PhaseState, m, kappa: float, t_end: float, tol: float = 1e-10) -> Trajectory:
    """Adaptive Dormand-Prince 8(5,3) integration on ``[0, t_end]`` with dense output."""
    m = np.asarray(m, dtype=float)

    def fun(_t, y):
        return eom_rhs(PhaseState.from_vector(y), m, kappa).as_vector()

    y0 = s0.as_vector()
    solver = DOP853(fun, 0.0, y0, t_end, rtol=tol, atol=tol)
    ts, ys, interps = [0.0], [y0], []

    def partial():
        sol = OdeSolution(ts, interps) if interps else None
        return Trajectory(np.array(ts), np.array(ys), sol)

    while solver.status == "running":
        try:
            message = solver.step()
        except DomainError as exc:
            raise IntegrationError(f"left the domain at t~{solver.t:.6g}: {exc}", partial()) from exc
        if solver.status == "failed":
            raise IntegrationError(f"integration failed at t={solver.t:.6g}: {message}", partial())
        ts.append(solver.t)
        ys.append(solver.y.copy())
        interps.append(solver.dense_output())
    return partial()


def verify_re(u_star, m, kappa: float, period: float = 2 * np.pi, tol: float = 1e-10,
              samples: int = 400) -> float:
    """Max-norm drift of the positions over one period, starting at rest from ``u_star``.

    For a genuine relative equilibrium the rotating-frame state never moves.
    """
    u_star = np.asarray(u_star, dtype=float)
    traj = integrate(PhaseState(u_star, np.zeros_like(u_star)), m, kappa, period, tol)
    dim = u_star.size
    grid = traj(np.linspace(0.0, period, samples))[:, :dim]
    drift = max(np.max(np.abs(traj.y[:, :dim] - u_star)), np.max(np.abs(grid - u_star)))
    return float(drift)
