"""Natural-parameter continuation of relative equilibria in the curvature.

Relative equilibria come in rotation orbits, so ``grad L(u; kappa) = 0`` alone
has no isolated solutions.  The orbit is pinned with a Poincare section and a
Lagrange multiplier ``alpha`` along the rotation generator is added; this
square system

    F(u, alpha; kappa) = ( grad L(u; kappa) + alpha J u ,  <u - a, J a> )

has isolated zeros (with ``alpha = 0``) near a non-degenerate seed ``a``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateSeedError,
    DomainError,
    PreconditionError,
    SingularJacobianError,
)
from .gradient import grad_lagrangian, hessian_fd, restricted_min_abs_eig
from .model import as_configuration, as_masses, points, rotation_generator

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-13
DEFAULT_STEP = 0.01
MIN_STEP = 1e-6
DAMPING_FLOOR = 2.0**-10
ARMIJO_C = 1e-4
SINGULAR_COND = 1e13
# a converged corrector that moved further than this (relative to the
# configuration size) is treated as a branch jump and the step is rejected
MAX_RELATIVE_JUMP = 0.1
# a failed solve whose best residual is below FLOOR_FACTOR * tol counts as an
# accuracy-floor attempt rather than a divergence
FLOOR_FACTOR = 1e3
FLOOR_ATTEMPTS = 3
EASY_ITERS = 3
EASY_STREAK = 3


@dataclass(frozen=True)
class PhaseAnchor:
    """Poincare section ``<u - a_ref, e> = 0`` with ``e = J a_ref``."""

    a_ref: np.ndarray
    e: np.ndarray

    @classmethod
    def from_configuration(cls, a) -> "PhaseAnchor":
        a = as_configuration(a).copy()
        e = rotation_generator(a)
        if not np.any(e):
            raise PreconditionError("anchor configuration has all bodies at the origin")
        a.setflags(write=False)
        e.setflags(write=False)
        return cls(a, e)


@dataclass(frozen=True)
class AugmentedState:
    u: np.ndarray
    alpha: float = 0.0

    def as_vector(self) -> np.ndarray:
        return np.append(self.u, self.alpha)

    @classmethod
    def from_vector(cls, x) -> "AugmentedState":
        x = np.asarray(x, dtype=float)
        return cls(x[:-1].copy(), float(x[-1]))


def augmented_map(state: AugmentedState, m, kappa: float, anchor: PhaseAnchor) -> np.ndarray:
    u = np.asarray(state.u, dtype=float)
    top = grad_lagrangian(u, m, kappa) + state.alpha * rotation_generator(u)
    return np.append(top, (u - anchor.a_ref) @ anchor.e)


def augmented_jacobian(
    state: AugmentedState, m, kappa: float, anchor: PhaseAnchor, h: float | None = None
) -> np.ndarray:
    """Bordered Jacobian ``[[D^2 L + alpha J, J u], [e^T, 0]]``."""
    u = np.asarray(state.u, dtype=float)
    dim = u.size
    jac = np.zeros((dim + 1, dim + 1))
    jac[:dim, :dim] = hessian_fd(u, m, kappa, h=h)
    # J as a matrix: d(J u)/du
    for b in range(dim // 2):
        jac[2 * b, 2 * b + 1] -= state.alpha
        jac[2 * b + 1, 2 * b] += state.alpha
    jac[:dim, dim] = rotation_generator(u)
    jac[dim, :dim] = anchor.e
    return jac


@dataclass
class NewtonReport:
    converged: bool
    iterations: int
    residual: float
    history: list = field(default_factory=list)


def _safe_residual(x, m, kappa, anchor):
    try:
        f = augmented_map(AugmentedState.from_vector(x), m, kappa, anchor)
    except DomainError:
        return None, np.inf
    return f, float(np.max(np.abs(f)))


def newton_solve(
    s0: AugmentedState,
    m,
    kappa: float,
    anchor: PhaseAnchor,
    tol: float = DEFAULT_TOL,
    max_iters: int = 25,
) -> tuple[AugmentedState, NewtonReport]:
    """Damped Newton on ``F(., kappa) = 0`` with Armijo backtracking on ``|F|^2``.

    Raises
    ------
    DomainError
        The starting point itself is outside the domain for ``kappa``.
    SingularJacobianError
        The bordered Jacobian is numerically singular.
    ConvergenceError
        ``max_iters`` iterations did not bring ``max|F|`` below ``tol``.
    """
    m = as_masses(m)
    x = s0.as_vector()
    f = augmented_map(s0, m, kappa, anchor)
    res = float(np.max(np.abs(f)))
    history = [res]
    for it in range(max_iters + 1):
        if res < tol:
            state = AugmentedState.from_vector(x)
            return state, NewtonReport(True, it, res, history)
        if it == max_iters:
            break
        jac = augmented_jacobian(AugmentedState.from_vector(x), m, kappa, anchor)
        if not np.all(np.isfinite(jac)) or np.linalg.cond(jac) > SINGULAR_COND:
            raise SingularJacobianError(
                f"bordered Jacobian singular at kappa={kappa}", last=x, history=history
            )
        dx = np.linalg.solve(jac, -f)

        phi0 = float(f @ f)
        t = 1.0
        best = None
        while t >= DAMPING_FLOOR:
            f_try, r_try = _safe_residual(x + t * dx, m, kappa, anchor)
            if f_try is not None:
                phi = float(f_try @ f_try)
                if best is None or phi < best[2]:
                    best = (t, f_try, phi, r_try)
                if phi <= (1.0 - 2.0 * ARMIJO_C * t) * phi0:
                    best = (t, f_try, phi, r_try)
                    break
            t *= 0.5
        if best is None:
            raise ConvergenceError(
                f"every damped step left the domain at kappa={kappa}", last=x, history=history
            )
        t, f, _, res = best
        x = x + t * dx
        history.append(res)
    raise ConvergenceError(
        f"Newton did not reach {tol:g} in {max_iters} iterations at kappa={kappa} "
        f"(best {min(history):.3g})",
        last=x,
        history=history,
    )


@dataclass(frozen=True)
class FamilyRecord:
    kappa: float
    u: np.ndarray
    alpha: float
    residual: float
    newton_iters: int
    min_abs_eig: float
    step_used: float


@dataclass(frozen=True)
class Termination:
    """Why a branch stopped.

    ``cause`` is one of ``limit_reached``, ``min_step`` (fold/bifurcation
    suspect), ``domain_error``, ``accuracy_floor`` or ``newton_failure``
    (fixed-step mode stops at the first failed step).
    """

    cause: str
    kappa: float
    message: str = ""


@dataclass
class ContinuationFamily:
    masses: np.ndarray
    direction: int
    anchor: PhaseAnchor
    records: list[FamilyRecord]
    termination: Termination | None = None

    @property
    def kappas(self) -> np.ndarray:
        return np.array([r.kappa for r in self.records])

    @property
    def terminal_kappa(self) -> float:
        return self.records[-1].kappa

    def nearest(self, kappa: float) -> FamilyRecord:
        i = int(np.argmin(np.abs(self.kappas - kappa)))
        return self.records[i]

    def __len__(self):
        return len(self.records)


def _min_abs_eig(u, m, kappa):
    return restricted_min_abs_eig(hessian_fd(u, m, kappa), rotation_generator(u))


def _direction_sign(direction) -> int:
    if direction in (1, "+", "pos", "positive"):
        return 1
    if direction in (-1, "-", "neg", "negative"):
        return -1
    raise ValueError(f"direction must be '+' or '-', got {direction!r}")


def continue_family(
    seed,
    direction="+",
    delta_kappa: float = DEFAULT_STEP,
    kappa_limit: float | None = None,
    tol: float = DEFAULT_TOL,
    adaptive: bool = True,
    min_step: float = MIN_STEP,
    max_iters: int = 25,
    max_relative_jump: float = MAX_RELATIVE_JUMP,
) -> ContinuationFamily:
    """Continue a non-degenerate planar seed in ``kappa`` from 0 towards ``kappa_limit``.

    ``seed`` is a :class:`~curved_nbody.seeds.SeedReport`.  Each step re-solves
    the augmented system starting from the previous relative equilibrium.  In
    adaptive mode a failed step is halved (down to ``min_step``) and the step
    is doubled, up to ``delta_kappa``, after three consecutive solves needing
    at most three Newton iterations.  With ``adaptive=False`` the grid
    ``kappa_i = i * delta_kappa`` is followed and the branch stops at the
    first failure.
    """
    if getattr(seed, "degenerate", False):
        raise DegenerateSeedError(
            f"seed is degenerate (kernel dimension {seed.kernel_dimension})", report=seed
        )
    if delta_kappa <= 0 or tol <= 0:
        raise ValueError("delta_kappa and tol must be positive")
    sgn = _direction_sign(direction)
    if kappa_limit is None:
        kappa_limit = sgn * np.inf
    if sgn * kappa_limit <= 0:
        raise ValueError(f"kappa_limit {kappa_limit} is not in direction {direction!r}")

    m = as_masses(seed.masses)
    a = as_configuration(seed.configuration, len(m))
    anchor = PhaseAnchor.from_configuration(a)

    state, rep = newton_solve(AugmentedState(a, 0.0), m, 0.0, anchor, tol=tol, max_iters=max_iters)
    records = [
        FamilyRecord(0.0, state.u, state.alpha, rep.residual, rep.iterations,
                     _min_abs_eig(state.u, m, 0.0), 0.0)
    ]
    family = ContinuationFamily(m, sgn, anchor, records)

    kappa = 0.0
    step = delta_kappa
    index = 0
    easy = 0
    floor_fails = 0
    last_failure = ""
    while True:
        if sgn * (kappa_limit - kappa) <= 1e-12:
            family.termination = Termination("limit_reached", kappa)
            break
        if adaptive:
            k_next = round(kappa + sgn * step, 12)
        else:
            k_next = round((index + 1) * sgn * delta_kappa, 12)
        if sgn * (k_next - kappa_limit) > 0:
            k_next = kappa_limit

        failure = None
        try:
            new, rep = newton_solve(AugmentedState(state.u, state.alpha), m, k_next, anchor,
                                    tol=tol, max_iters=max_iters)
            jump = np.max(np.abs(new.u - state.u))
            if jump > max_relative_jump * np.max(np.abs(state.u)):
                failure = ("jump", f"corrector jumped {jump:.3g} at kappa={k_next}")
        except DomainError as exc:
            failure = ("domain", str(exc))
        except ConvergenceError as exc:
            kind = "floor" if exc.best_residual < FLOOR_FACTOR * tol else "newton"
            failure = (kind, str(exc))

        if failure is None:
            floor_fails = 0
            records.append(
                FamilyRecord(k_next, new.u, new.alpha, rep.residual, rep.iterations,
                             _min_abs_eig(new.u, m, k_next), abs(k_next - kappa))
            )
            kappa, state = k_next, new
            index += 1
            if adaptive:
                easy = easy + 1 if rep.iterations <= EASY_ITERS else 0
                if easy >= EASY_STREAK and step < delta_kappa:
                    step = min(2.0 * step, delta_kappa)
                    easy = 0
            continue

        kind, msg = failure
        log.debug("step to kappa=%s failed (%s): %s", k_next, kind, msg)
        last_failure = kind
        if kind == "floor":
            floor_fails += 1
            if floor_fails >= FLOOR_ATTEMPTS:
                family.termination = Termination("accuracy_floor", kappa, msg)
                break
        else:
            floor_fails = 0
        if not adaptive:
            cause = {"domain": "domain_error", "floor": "accuracy_floor"}.get(kind, "newton_failure")
            family.termination = Termination(cause, kappa, msg)
            break
        step *= 0.5
        easy = 0
        if step < min_step:
            cause = "domain_error" if last_failure == "domain" else "min_step"
            family.termination = Termination(
                cause, kappa, f"step fell below {min_step:g} beyond kappa={kappa}: {msg}"
            )
            break
    log.info("branch %s stopped at kappa=%.8g (%s), %d records",
             "+" if sgn > 0 else "-", kappa, family.termination.cause, len(records))
    return family


@dataclass(frozen=True)
class FamilyDiagnostics:
    kappa: np.ndarray
    min_abs_eig: np.ndarray
    newton_iters: np.ndarray
    min_radius: np.ndarray
    flagged: list[int]


def family_diagnostics(family: ContinuationFamily, rtol: float = 1e-6) -> FamilyDiagnostics:
    """Traces along a branch plus the indices whose restricted Hessian nearly loses rank.

    A record is flagged when its ``min_abs_eig`` drops below ``rtol`` times the
    value at the first record.
    """
    recs = family.records
    if not recs:
        raise ValueError("empty family")
    eig = np.array([r.min_abs_eig for r in recs])
    radius = np.array([np.min(np.linalg.norm(points(r.u), axis=1)) for r in recs])
    flagged = [i for i in range(len(recs)) if eig[i] < rtol * eig[0]]
    return FamilyDiagnostics(
        kappa=np.array([r.kappa for r in recs]),
        min_abs_eig=eig,
        newton_iters=np.array([r.newton_iters for r in recs]),
        min_radius=radius,
        flagged=flagged,
    )
