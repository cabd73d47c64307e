"""Damped Newton iteration for ``Phi(kappa) = delta(kappa) - delta* = 0``.

Each Newton step solves ``J h = Phi`` by Gaussian elimination with complete
(row and column) pivoting.  When the largest remaining pivot candidate drops
below ``eps1`` the elimination stops and every still-undetermined component
of ``h`` is set to zero: directions the data cannot resolve are simply left
alone for that iteration.  This truncation is the only regularisation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError, NoConvergence, PolePassageError, StepFailure
from .scattering import KAPPA_MIN, KappaVector, PhaseShiftSet, residual
from .sensitivity import jacobian

__all__ = ["NewtonConfig", "NewtonTrace", "gauss_solve_truncated", "newton_solve"]

log = logging.getLogger(__name__)

MAX_HALVINGS = 30


@dataclass(frozen=True)
class NewtonConfig:
    gamma: float = 1.0
    eps: float = 1e-14
    eps1: float = 1e-10
    max_iter: int = 200
    kappa_min: float = KAPPA_MIN

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not self.eps > 0.0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        if not self.eps1 >= 0.0:
            raise DomainError(f"eps1 must be non-negative, got {self.eps1}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class NewtonTrace:
    """Per-iteration record; entry 0 of each history is the initial guess."""

    iterations: int = 0
    residual_l2: list = field(default_factory=list)
    residual_sup: list = field(default_factory=list)
    truncation_events: list = field(default_factory=list)
    step_gammas: list = field(default_factory=list)
    final_kappa: KappaVector | None = None
    converged: bool = False

    @property
    def residual_history(self):
        return list(zip(self.residual_l2, self.residual_sup))

    @property
    def final_residual(self) -> float:
        return self.residual_l2[-1]

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_l2": [float(v) for v in self.residual_l2],
            "residual_sup": [float(v) for v in self.residual_sup],
            "truncation_events": [int(v) for v in self.truncation_events],
            "step_gammas": [float(v) for v in self.step_gammas],
        }


def gauss_solve_truncated(J, rhs, eps1: float = 1e-10):
    """Solve ``J h = rhs`` by complete pivoting, truncating at small pivots.

    Returns ``(h, zeroed)`` where ``zeroed`` lists the (0-based, original
    order) components of ``h`` that were never determined because the
    largest remaining matrix element fell below ``eps1``.

    >>> h, z = gauss_solve_truncated(np.diag([1.0, 1e-12]), [1.0, 1.0])
    >>> h.tolist(), z
    ([1.0, 0.0], [1])
    """
    a = np.array(J, dtype=float)
    b = np.array(rhs, dtype=float).ravel()
    n = b.size
    if a.shape != (n, n):
        raise DimensionMismatch(f"matrix shape {a.shape} does not match right-hand side of length {n}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DomainError("non-finite entries in linear system")

    cols = np.arange(n)  # cols[p] = original unknown eliminated at step p
    rank = n
    for p in range(n):
        block = np.abs(a[p:, p:])
        flat = int(np.argmax(block))
        i, j = divmod(flat, n - p)
        if block[i, j] < eps1 or block[i, j] == 0.0:
            rank = p
            break
        i += p
        j += p
        if i != p:
            a[[p, i], :] = a[[i, p], :]
            b[[p, i]] = b[[i, p]]
        if j != p:
            a[:, [p, j]] = a[:, [j, p]]
            cols[[p, j]] = cols[[j, p]]
        m = a[p + 1 :, p] / a[p, p]
        a[p + 1 :, p:] -= np.outer(m, a[p, p:])
        b[p + 1 :] -= m * b[p]

    y = np.zeros(n)
    for p in range(rank - 1, -1, -1):
        y[p] = (b[p] - a[p, p + 1 : rank] @ y[p + 1 : rank]) / a[p, p]

    h = np.zeros(n)
    h[cols] = y
    zeroed = sorted(int(c) for c in cols[rank:])
    return h, zeroed


def _norms(phi):
    return float(np.linalg.norm(phi)), float(np.max(np.abs(phi)))


def newton_solve(target: PhaseShiftSet, breakpoints, init: KappaVector, cfg: NewtonConfig | None = None):
    """Iterate ``kappa <- kappa - gamma h`` until ``||Phi||_2 < cfg.eps``.

    A step that would push some kappa below ``cfg.kappa_min`` or drive the
    ratio propagation through a pole is retried with gamma halved (30 times
    at most, then :class:`StepFailure`).  Running out of iterations raises
    :class:`NoConvergence`; both exceptions carry the trace.
    """
    cfg = cfg or NewtonConfig()
    n = len(init)
    if len(target) != n:
        raise DimensionMismatch(f"target holds {len(target)} phase shifts, expected N = {n}")
    if abs(target.k - init.k) > 1e-14 * init.k:
        raise DomainError(f"target k = {target.k} differs from initial guess k = {init.k}")
    if np.any(init.kappas <= cfg.kappa_min):
        raise DomainError("initial guess violates the kappa guard")

    trace = NewtonTrace()
    kv = init
    phi = residual(kv, breakpoints, target)
    l2, sup = _norms(phi)
    trace.residual_l2.append(l2)
    trace.residual_sup.append(sup)
    trace.final_kappa = kv

    while l2 >= cfg.eps:
        if trace.iterations >= cfg.max_iter:
            raise NoConvergence(
                f"no convergence after {cfg.max_iter} iterations (||Phi||_2 = {l2:.3e})",
                trace=trace,
                kappa=kv,
            )
        h, zeroed = gauss_solve_truncated(jacobian(kv, breakpoints, n), phi, cfg.eps1)

        gamma = cfg.gamma
        for _ in range(MAX_HALVINGS + 1):
            trial = kv.kappas - gamma * h
            if np.all(trial > cfg.kappa_min):
                try:
                    new_kv = kv.with_kappas(trial)
                    new_phi = residual(new_kv, breakpoints, target)
                    break
                except PolePassageError as exc:
                    log.debug("step rejected (%s); halving gamma", exc)
            gamma *= 0.5
        else:
            raise StepFailure(
                f"iteration {trace.iterations + 1}: no admissible step after {MAX_HALVINGS} halvings",
                trace=trace,
            )

        kv, phi = new_kv, new_phi
        l2, sup = _norms(phi)
        trace.iterations += 1
        trace.residual_l2.append(l2)
        trace.residual_sup.append(sup)
        trace.truncation_events.append(len(zeroed))
        trace.step_gammas.append(gamma)
        trace.final_kappa = kv
        log.debug("iter %d: |Phi|_2=%.3e gamma=%g zeroed=%s", trace.iterations, l2, gamma, zeroed)

    trace.converged = True
    return kv, trace
