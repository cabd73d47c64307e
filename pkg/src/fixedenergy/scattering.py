"""Fixed-energy phase shifts of piecewise-constant radial potentials.

The potential is ``q(r) = q_i`` on ``[r_{i-1}, r_i)``, ``i = 1..N``, with
``r_0 = 0`` and ``q = 0`` beyond ``R = r_N``.  On interval ``i`` the regular
solution is ``A_i u_l(kappa_i r) + B_i v_l(kappa_i r)`` with
``kappa_i = sqrt(k^2 - q_i)``.  Matching value and slope at every ``r_i``
gives a 2x2 interface matrix; only the ratio ``x_i = B_i / A_i`` is carried,
starting from ``x_1 = 0`` (regularity at the origin).  The exterior region is
treated as interval ``N + 1`` with ``kappa_{N+1} = k``, and

    delta_l = -arctan(x_{N+1})

taken on the principal branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError, KappaDomainError, PolePassageError
from .special import riccati_bessel_arrays

__all__ = [
    "KAPPA_MIN",
    "POLE_RTOL",
    "PiecewiseConstantPotential",
    "KappaVector",
    "InterfaceMatrix",
    "PropagationState",
    "PhaseShiftSet",
    "kappa_from_potential",
    "potential_from_kappa",
    "interface_matrix",
    "propagate_ratio",
    "phase_shift",
    "phase_shifts",
    "residual",
]

KAPPA_MIN = 1e-8
POLE_RTOL = 1e-12


def _as_breakpoints(breakpoints) -> np.ndarray:
    r = np.asarray(breakpoints, dtype=float).ravel()
    if r.size < 1:
        raise DomainError("at least one interval is required")
    if not np.all(np.isfinite(r)) or np.any(r <= 0.0):
        raise DomainError("breakpoints must be finite and positive")
    if np.any(np.diff(r) <= 0.0):
        raise DomainError("breakpoints must be strictly increasing")
    return r


@dataclass(frozen=True)
class PiecewiseConstantPotential:
    """Step potential with ``values[i]`` on ``[breakpoints[i-1], breakpoints[i])``.

    ``breakpoints`` holds r_1..r_N; r_0 = 0 is implicit.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = _as_breakpoints(self.breakpoints)
        q = np.asarray(self.values, dtype=float).ravel()
        if q.shape != r.shape:
            raise DimensionMismatch(f"{r.size} breakpoints but {q.size} values")
        if not np.all(np.isfinite(q)):
            raise DomainError("potential values must be finite")
        object.__setattr__(self, "breakpoints", r)
        object.__setattr__(self, "values", q)

    @property
    def n_intervals(self) -> int:
        return self.breakpoints.size

    @property
    def radius(self) -> float:
        return float(self.breakpoints[-1])

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        idx = np.searchsorted(self.breakpoints, r, side="right")
        padded = np.append(self.values, 0.0)
        return padded[idx]

    @classmethod
    def uniform(cls, values, step: float):
        values = np.asarray(values, dtype=float)
        return cls(step * np.arange(1, values.size + 1), values)

    @classmethod
    def from_dict(cls, data: dict):
        return cls(data["breakpoints"], data["values"])

    def to_dict(self, k: float | None = None) -> dict:
        out = {}
        if k is not None:
            out["k"] = float(k)
        out["breakpoints"] = [float(r) for r in self.breakpoints]
        out["values"] = [float(q) for q in self.values]
        return out


@dataclass(frozen=True)
class KappaVector:
    """Local wave numbers ``kappa_i = sqrt(k^2 - q_i)`` at fixed ``k``."""

    k: float
    kappas: np.ndarray

    def __post_init__(self):
        k = float(self.k)
        if not math.isfinite(k) or k <= 0.0:
            raise DomainError(f"wave number k must be finite and > 0, got {self.k!r}")
        kap = np.asarray(self.kappas, dtype=float).ravel()
        if kap.size < 1:
            raise DomainError("empty kappa vector")
        bad = np.flatnonzero(~(np.isfinite(kap) & (kap > 0.0)))
        if bad.size:
            i = int(bad[0])
            raise KappaDomainError(f"kappa_{i + 1} = {kap[i]!r} is not a positive real", index=i)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "kappas", kap)

    def __len__(self):
        return self.kappas.size

    def potential_values(self) -> np.ndarray:
        return self.k**2 - self.kappas**2

    def with_kappas(self, kappas) -> "KappaVector":
        return KappaVector(self.k, kappas)


def kappa_from_potential(pot: PiecewiseConstantPotential, k: float, kappa_min: float = KAPPA_MIN) -> KappaVector:
    """Map a potential to local wave numbers.

    Raises :class:`KappaDomainError` naming the first interval where
    ``k^2 - q_i <= kappa_min^2`` (zero or imaginary local wave number).
    """
    k = float(k)
    if not math.isfinite(k) or k <= 0.0:
        raise DomainError(f"wave number k must be finite and > 0, got {k!r}")
    kk = k * k - pot.values
    bad = np.flatnonzero(kk <= kappa_min**2)
    if bad.size:
        i = int(bad[0])
        raise KappaDomainError(
            f"interval {i + 1}: k^2 - q = {kk[i]:.6g} leaves no real local wave number above {kappa_min:g}",
            index=i,
        )
    return KappaVector(k, np.sqrt(kk))


def potential_from_kappa(kv: KappaVector, breakpoints) -> PiecewiseConstantPotential:
    return PiecewiseConstantPotential(breakpoints, kv.potential_values())


@dataclass(frozen=True)
class InterfaceMatrix:
    """The matrix alpha^i coupling (A_i, B_i) to kappa_{i+1} (A_{i+1}, B_{i+1})."""

    a11: float
    a12: float
    a21: float
    a22: float
    index: int = 0
    radius: float = float("nan")

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])


@dataclass
class PropagationState:
    x: float = 0.0
    interface_index: int = 1


@dataclass(frozen=True)
class PhaseShiftSet:
    """Phase shifts ``deltas[l]``, l = 0..L-1, in radians at wave number ``k``."""

    k: float
    deltas: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float).ravel()
        if d.size < 1:
            raise DomainError("a phase-shift set needs at least one entry")
        if not np.all(np.isfinite(d)):
            raise DomainError("phase shifts must be finite")
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "deltas", d)

    def __len__(self):
        return self.deltas.size


def _check_args(l_max: int, r: float, *kappas: float):
    if l_max < 0:
        raise DomainError(f"angular momentum must be >= 0, got {l_max}")
    for val in (r, *kappas):
        if not math.isfinite(val) or val <= 0.0:
            raise DomainError(f"interface arguments must be positive and finite, got {val!r}")


def _interface_rows(l_max, kappa_i, kappa_next, r_i):
    """Riccati-Bessel rows at both sides of interface ``r_i`` for all l <= l_max."""
    left = riccati_bessel_arrays(l_max, kappa_i * r_i)
    right = left if kappa_next == kappa_i else riccati_bessel_arrays(l_max, kappa_next * r_i)
    return left, right


def _alpha_entries(kappa_i, kappa_next, left, right):
    u, u1, _, v, v1, _ = left
    U, U1, _, V, V1, _ = right
    # products grouped so that equal kappas cancel the off-diagonals exactly
    a11 = kappa_next * (u * V1) - kappa_i * (u1 * V)
    a12 = kappa_next * (v * V1) - kappa_i * (v1 * V)
    a21 = kappa_i * (u1 * U) - kappa_next * (u * U1)
    a22 = kappa_i * (v1 * U) - kappa_next * (v * U1)
    return a11, a12, a21, a22


def interface_matrix(l: int, kappa_i: float, kappa_next: float, r_i: float, index: int = 0) -> InterfaceMatrix:
    """Interface matrix alpha^i at ``r_i`` for angular momentum ``l``.

    Its determinant is ``kappa_i * kappa_next`` and it reduces to
    ``kappa * I`` when both sides carry the same ``kappa``.
    """
    _check_args(l, r_i, kappa_i, kappa_next)
    left, right = _interface_rows(l, kappa_i, kappa_next, r_i)
    a = _alpha_entries(kappa_i, kappa_next, left, right)
    return InterfaceMatrix(*(float(e[l]) for e in a), index=index, radius=float(r_i))


def _layout(kv: KappaVector, breakpoints):
    r = _as_breakpoints(breakpoints)
    if r.size != len(kv):
        raise DimensionMismatch(f"{r.size} breakpoints but {len(kv)} local wave numbers")
    return r, np.append(kv.kappas, kv.k)


def _pole_check(den, num_a11, num_a12x, ls, interface):
    scale = np.maximum(np.maximum(np.abs(num_a11), np.abs(num_a12x)), 1.0)
    bad = np.flatnonzero(~(np.abs(den) >= POLE_RTOL * scale))
    if bad.size:
        l = int(ls[bad[0]])
        raise PolePassageError(
            f"l={l}: coefficient ratio passes through a pole at interface {interface}",
            l=l,
            interface=interface,
        )


def propagate_ratios(kv: KappaVector, breakpoints, l_max: int) -> np.ndarray:
    """Final ratios ``x_{N+1}`` for every ``l = 0..l_max`` in one sweep."""
    r, kap = _layout(kv, breakpoints)
    ls = np.arange(l_max + 1)
    x = np.zeros(l_max + 1)
    for i in range(r.size):
        left, right = _interface_rows(l_max, kap[i], kap[i + 1], r[i])
        a11, a12, a21, a22 = _alpha_entries(kap[i], kap[i + 1], left, right)
        den = a11 + a12 * x
        _pole_check(den, a11, a12 * x, ls, i + 1)
        x = (a21 + a22 * x) / den
    return x


def propagate_ratio(l: int, kv: KappaVector, breakpoints, states: list | None = None) -> float:
    """Carry ``x_i = B_i/A_i`` from ``x_1 = 0`` out to the exterior ratio ``x_{N+1}``.

    If ``states`` is a list, the :class:`PropagationState` after every
    interface crossing is appended to it (starting with ``x_1``).
    """
    r, kap = _layout(kv, breakpoints)
    state = PropagationState(0.0, 1)
    if states is not None:
        states.append(PropagationState(state.x, state.interface_index))
    for i in range(r.size):
        m = interface_matrix(l, kap[i], kap[i + 1], r[i], index=i + 1)
        den = m.a11 + m.a12 * state.x
        _pole_check(np.array([den]), m.a11, m.a12 * state.x, [l], i + 1)
        state = PropagationState((m.a21 + m.a22 * state.x) / den, i + 2)
        if states is not None:
            states.append(state)
    return state.x


def phase_shift(l: int, kv: KappaVector, breakpoints) -> float:
    return -math.atan(propagate_ratio(l, kv, breakpoints))


def phase_shifts(kv: KappaVector, breakpoints, L: int) -> PhaseShiftSet:
    """Phase shifts ``delta_0 .. delta_{L-1}``; a pole reports the failing ``l``."""
    if L < 1:
        raise DomainError(f"need at least one partial wave, got L={L}")
    x = propagate_ratios(kv, breakpoints, L - 1)
    return PhaseShiftSet(kv.k, -np.arctan(x))


def residual(kv: KappaVector, breakpoints, target: PhaseShiftSet) -> np.ndarray:
    """``Phi(kappa) = delta(kappa) - delta*`` for the square system L = N."""
    n = len(kv)
    if len(target) != n:
        raise DimensionMismatch(f"target holds {len(target)} phase shifts, expected N = {n}")
    return phase_shifts(kv, breakpoints, n).deltas - target.deltas
