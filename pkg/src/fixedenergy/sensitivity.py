"""Exact derivatives of the phase shifts with respect to the local wave numbers.

The ratio update ``x' = (a21 + a22 x) / (a11 + a12 x)`` is differentiated
alongside the forward sweep.  Its derivative in ``x`` is ``det(alpha)/den^2``,
and the interface matrix at ``r_i`` depends directly on ``kappa_i`` and
``kappa_{i+1}`` only, so a whole Jacobian row costs one pass per ``l``
(all ``l`` are swept together as arrays).  ``k`` is data, never a variable:
at the outermost interface only the ``kappa_N`` derivative is taken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scattering import (
    KappaVector,
    _alpha_entries,
    _check_args,
    _interface_rows,
    _layout,
    _pole_check,
)

__all__ = [
    "InterfaceMatrixPartials",
    "SensitivityState",
    "interface_matrix_partials",
    "propagate_sensitivities",
    "jacobian",
]


@dataclass(frozen=True)
class InterfaceMatrixPartials:
    """Derivatives of (a11, a12, a21, a22) in ``kappa_i`` (``d_i``) and ``kappa_{i+1}`` (``d_next``)."""

    d_i: np.ndarray
    d_next: np.ndarray


@dataclass
class SensitivityState:
    x: float
    grad: np.ndarray


def _alpha_partials(kappa_i, kappa_next, r, left, right):
    u, u1, u2, v, v1, v2 = left
    U, U1, U2, V, V1, V2 = right
    ri = kappa_i * r
    rn = kappa_next * r
    d_i = (
        kappa_next * r * u1 * V1 - u1 * V - ri * u2 * V,
        kappa_next * r * v1 * V1 - v1 * V - ri * v2 * V,
        u1 * U + ri * u2 * U - kappa_next * r * u1 * U1,
        v1 * U + ri * v2 * U - kappa_next * r * v1 * U1,
    )
    d_next = (
        u * V1 + rn * u * V2 - kappa_i * r * u1 * V1,
        v * V1 + rn * v * V2 - kappa_i * r * v1 * V1,
        kappa_i * r * u1 * U1 - u * U1 - rn * u * U2,
        kappa_i * r * v1 * U1 - v * U1 - rn * v * U2,
    )
    return d_i, d_next


def interface_matrix_partials(l: int, kappa_i: float, kappa_next: float, r_i: float) -> InterfaceMatrixPartials:
    _check_args(l, r_i, kappa_i, kappa_next)
    left, right = _interface_rows(l, kappa_i, kappa_next, r_i)
    d_i, d_next = _alpha_partials(kappa_i, kappa_next, r_i, left, right)
    return InterfaceMatrixPartials(
        np.array([float(e[l]) for e in d_i]),
        np.array([float(e[l]) for e in d_next]),
    )


def _sweep(kv: KappaVector, breakpoints, l_max: int, history=None):
    r, kap = _layout(kv, breakpoints)
    n = r.size
    ls = np.arange(l_max + 1)
    x = np.zeros(l_max + 1)
    grad = np.zeros((l_max + 1, n))
    for i in range(n):
        left, right = _interface_rows(l_max, kap[i], kap[i + 1], r[i])
        a11, a12, a21, a22 = _alpha_entries(kap[i], kap[i + 1], left, right)
        d_i, d_next = _alpha_partials(kap[i], kap[i + 1], r[i], left, right)

        den = a11 + a12 * x
        _pole_check(den, a11, a12 * x, ls, i + 1)
        num = a21 + a22 * x
        den2 = den * den

        grad *= ((a11 * a22 - a12 * a21) / den2)[:, None]
        grad[:, i] += (den * (d_i[2] + x * d_i[3]) - num * (d_i[0] + x * d_i[1])) / den2
        if i + 1 < n:
            grad[:, i + 1] += (den * (d_next[2] + x * d_next[3]) - num * (d_next[0] + x * d_next[1])) / den2
        x = num / den
        if history is not None:
            history.append(SensitivityState(x.copy(), grad.copy()))
    return x, grad


def propagate_sensitivities(l: int, kv: KappaVector, breakpoints, history: list | None = None):
    """Return ``(x_{N+1}, grad)`` with ``grad[j] = d x_{N+1} / d kappa_{j+1}``.

    ``history``, if given, receives one :class:`SensitivityState` per
    interface crossing (for all l up to ``l``; row ``l`` is the one asked for).
    """
    if l < 0:
        raise DomainError(f"angular momentum must be >= 0, got {l}")
    x, grad = _sweep(kv, breakpoints, l, history)
    return float(x[l]), grad[l].copy()


def jacobian(kv: KappaVector, breakpoints, n: int | None = None) -> np.ndarray:
    """Matrix ``J[l, j] = d delta_l / d kappa_j`` for ``l = 0..n-1``.

    ``n`` defaults to the number of intervals (square system).  The chain
    rule through ``delta = -arctan x`` contributes ``-1 / (1 + x^2)``.
    """
    n = len(kv) if n is None else int(n)
    if n < 1:
        raise DomainError(f"need at least one row, got n={n}")
    x, grad = _sweep(kv, breakpoints, n - 1)
    return -grad / (1.0 + x * x)[:, None]


def phase_shifts_and_jacobian(kv: KappaVector, breakpoints, n: int | None = None):
    """Phase shifts and their Jacobian from a single sweep."""
    n = len(kv) if n is None else int(n)
    x, grad = _sweep(kv, breakpoints, n - 1)
    deltas = -np.arctan(x)
    return deltas, -grad / (1.0 + x * x)[:, None]

