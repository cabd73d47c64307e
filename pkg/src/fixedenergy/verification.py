"""Independent oracles and decay diagnostics.

Nothing here shares code with the transfer-matrix path beyond the data
classes:

* :func:`ode_phase_shifts` integrates the radial equation directly with a
  classical RK4 scheme in ``t = ln r`` and matches to ``scipy.special``
  spherical Bessel functions at ``R``.
* :func:`mp_phase_shifts` redoes the interface propagation in mpmath
  arithmetic with its own upward recurrences, which lets central differences
  resolve Jacobian entries many orders below ``|delta_l|``.
* :func:`range_estimate` evaluates the high-l range formula in log space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import special as sp

from .errors import DomainError, EmptyWindow, NonConvergedRefinement
from .inversion import gauss_solve_truncated
from .scattering import KappaVector, PiecewiseConstantPotential, phase_shifts
from .special import riccati_bessel

__all__ = [
    "OracleSolution",
    "RangeDiagnostic",
    "ode_phase_shift",
    "ode_phase_shifts",
    "mp_phase_shifts",
    "finite_difference_jacobian",
    "range_estimate",
    "condition_estimate",
    "min_complete_pivot",
    "wronskian_sweep",
]

DEFAULT_STEP = 4e-3
REFINE_TOL = 1e-8


@dataclass
class OracleSolution:
    l: int
    k: float
    delta: float
    grid_step: float
    samples: np.ndarray | None = None


# -- direct ODE integration ------------------------------------------------


def _rk4_log_radius(pot, k, ls, r_start, dt, keep_samples=False):
    """Integrate y = phi, w = r phi' in t = ln r for every l in ``ls`` at once.

    In t the radial equation reads  y' = w,  w' = w + (l(l+1) + (q - k^2) r^2) y,
    which removes the 1/r^2 stiffness near the origin.
    """
    ls = np.asarray(ls, dtype=float)
    cent = ls * (ls + 1.0)
    q1 = pot.values[0]
    c = (q1 - k * k) / (4.0 * ls + 6.0)
    # phi ~ r^{l+1}(1 + c r^2) is divided through by r_start^{l+1}; delta ignores scale
    y = 1.0 + c * r_start**2
    w = (ls + 1.0) + c * (ls + 3.0) * r_start**2

    samples = [] if keep_samples else None
    edges = np.concatenate([[r_start], pot.breakpoints])
    t_edges = np.log(edges)
    for i in range(pot.n_intervals):
        if edges[i + 1] <= r_start:
            continue
        dq = pot.values[i] - k * k
        t0, t1 = t_edges[i], t_edges[i + 1]
        steps = max(1, int(math.ceil((t1 - t0) / dt)))
        h = (t1 - t0) / steps

        def rhs(t, y, w):
            return w, w + (cent + dq * math.exp(2.0 * t)) * y

        t = t0
        for _ in range(steps):
            k1y, k1w = rhs(t, y, w)
            k2y, k2w = rhs(t + 0.5 * h, y + 0.5 * h * k1y, w + 0.5 * h * k1w)
            k3y, k3w = rhs(t + 0.5 * h, y + 0.5 * h * k2y, w + 0.5 * h * k2w)
            k4y, k4w = rhs(t + h, y + h * k3y, w + h * k3w)
            y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            w = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            t += h
            # keep the l >> 1 columns from overflowing; only y/w matters
            scale = np.maximum(np.abs(y), 1.0)
            y = y / scale
            w = w / scale
            if keep_samples:
                samples.append(np.concatenate([[math.exp(t)], y]))
    return y, w, (np.array(samples) if keep_samples else None)


def _match(y, w, k, R, ls):
    """Phase shift from (phi, r phi') at R against z j_l(z), z y_l(z)."""
    z = k * R
    ls = np.asarray(ls)
    jl = sp.spherical_jn(ls, z)
    yl = sp.spherical_yn(ls, z)
    djl = sp.spherical_jn(ls, z, derivative=True)
    dyl = sp.spherical_yn(ls, z, derivative=True)
    u, v = z * jl, z * yl
    du, dv = jl + z * djl, yl + z * dyl
    dphi = w / R / k  # d phi / d z
    A = y * dv - dphi * v
    B = dphi * u - y * du
    return -np.arctan(B / A)


def _start_radius(pot):
    return min(1e-3, pot.breakpoints[0] / 100.0)


def ode_phase_shifts(pot: PiecewiseConstantPotential, k: float, ls, step: float = DEFAULT_STEP,
                     tol: float = REFINE_TOL, max_refinements: int = 6) -> list[OracleSolution]:
    """ODE-oracle phase shifts for several l, refined until halving ``step`` moves delta by < ``tol``.

    ``step`` is the RK4 step in ``ln r``.
    """
    ls = np.atleast_1d(np.asarray(ls, dtype=int))
    if np.any(ls < 0):
        raise DomainError("angular momenta must be non-negative")
    if not step > 0.0:
        raise DomainError("integration step must be positive")
    r0 = _start_radius(pot)
    R = pot.radius

    def run(dt):
        y, w, _ = _rk4_log_radius(pot, k, ls, r0, dt)
        return _match(y, w, k, R, ls)

    coarse = run(step)
    for _ in range(max_refinements):
        step *= 0.5
        fine = run(step)
        if np.max(np.abs(fine - coarse)) < tol:
            return [OracleSolution(int(l), float(k), float(d), step) for l, d in zip(ls, fine)]
        coarse = fine
    raise NonConvergedRefinement(
        f"step halving still changes delta by {np.max(np.abs(fine - coarse)):.2e} at step {step:g}"
    )


def ode_phase_shift(pot: PiecewiseConstantPotential, k: float, l: int, step: float = DEFAULT_STEP,
                    keep_samples: bool = False) -> OracleSolution:
    sol = ode_phase_shifts(pot, k, [l], step)[0]
    if keep_samples:
        y, _, samples = _rk4_log_radius(pot, k, [l], _start_radius(pot), sol.grid_step, keep_samples=True)
        sol.samples = samples
    return sol


# -- extended precision forward solve ----------------------------------------


def _mp_riccati(l_max, z):
    s, c = mpmath.sin(z), mpmath.cos(z)
    u = [s, s / z - c]
    v = [-c, -c / z - s]
    for l in range(1, l_max):
        u.append((2 * l + 1) / z * u[l] - u[l - 1])
        v.append((2 * l + 1) / z * v[l] - v[l - 1])
    u1 = [c] + [u[l - 1] - l / z * u[l] for l in range(1, l_max + 1)]
    v1 = [s] + [v[l - 1] - l / z * v[l] for l in range(1, l_max + 1)]
    return u[: l_max + 1], u1, v[: l_max + 1], v1


def mp_phase_shifts(kappas, k, breakpoints, L: int, dps: int = 60) -> list:
    """Phase shifts 0..L-1 in mpmath arithmetic (returned as mpf).

    Uses plain upward recurrence for both Riccati-Bessel kinds; the lost
    digits are paid for by the working precision ``dps``.
    """
    with mpmath.workdps(dps):
        kap = [mpmath.mpf(x) for x in kappas] + [mpmath.mpf(k)]
        rs = [mpmath.mpf(x) for x in breakpoints]
        x = [mpmath.mpf(0)] * L
        for i, r in enumerate(rs):
            a, b = kap[i], kap[i + 1]
            u, u1, v, v1 = _mp_riccati(L - 1, a * r)
            U, U1, V, V1 = _mp_riccati(L - 1, b * r)
            for l in range(L):
                a11 = b * u[l] * V1[l] - a * u1[l] * V[l]
                a12 = b * v[l] * V1[l] - a * v1[l] * V[l]
                a21 = a * u1[l] * U[l] - b * u[l] * U1[l]
                a22 = a * v1[l] * U[l] - b * v[l] * U1[l]
                x[l] = (a21 + a22 * x[l]) / (a11 + a12 * x[l])
        return [-mpmath.atan(xl) for xl in x]


def finite_difference_jacobian(kv: KappaVector, breakpoints, n: int | None = None,
                               fd_step: float = 1e-6, dps: int | None = None) -> np.ndarray:
    """Central-difference Jacobian of delta_0..delta_{n-1} in each kappa_j.

    With ``dps=None`` the double-precision forward solver is differenced; this
    is limited by rounding to about ``1e-16 |delta_l| / fd_step`` per entry.
    Passing ``dps`` differences :func:`mp_phase_shifts` instead.
    """
    if not 1e-8 <= fd_step <= 1e-4:
        raise DomainError(f"fd_step must lie in [1e-8, 1e-4], got {fd_step}")
    n = len(kv) if n is None else int(n)
    m = len(kv)
    out = np.empty((n, m))
    if dps is None:
        for j in range(m):
            plus = kv.kappas.copy()
            minus = kv.kappas.copy()
            plus[j] += fd_step
            minus[j] -= fd_step
            dp = phase_shifts(kv.with_kappas(plus), breakpoints, n).deltas
            dm = phase_shifts(kv.with_kappas(minus), breakpoints, n).deltas
            out[:, j] = (dp - dm) / (2.0 * fd_step)
        return out
    with mpmath.workdps(dps):
        base = [mpmath.mpf(float(x)) for x in kv.kappas]
        h = mpmath.mpf(fd_step)
        for j in range(m):
            plus = list(base)
            minus = list(base)
            plus[j] += h
            minus[j] -= h
            dp = mp_phase_shifts(plus, kv.k, breakpoints, n, dps)
            dm = mp_phase_shifts(minus, kv.k, breakpoints, n, dps)
            out[:, j] = [float((a - b) / (2 * h)) for a, b in zip(dp, dm)]
    return out


# -- range formula ----------------------------------------------------------


@dataclass
class RangeDiagnostic:
    """Per-l range estimates and the fitted constant of the decay bound.

    ``estimates[i]`` belongs to ``ls[i]`` and is NaN where ``|delta_l|`` was
    too small to use (those l are listed in ``undefined``).
    """

    ls: np.ndarray
    estimates: np.ndarray
    radius: float
    bound_constant: float
    k: float = 1.0
    undefined: list = field(default_factory=list)
    warning: str | None = None

    @property
    def final_estimate(self) -> float:
        good = self.estimates[np.isfinite(self.estimates)]
        return float(good[-1])

    def bound(self, l):
        """``c (k a e / (2l+1))^{2l}`` evaluated in log space."""
        l = np.asarray(l, dtype=float)
        return self.bound_constant * np.exp(2 * l * np.log(self.k * self.radius * math.e / (2 * l + 1)))

    def is_monotone_increasing(self) -> bool:
        good = self.estimates[np.isfinite(self.estimates)]
        return bool(np.all(np.diff(good) > 0.0))


TINY_DELTA = 1e-300


def range_estimate(shifts, l_window=range(15, 31), radius: float | None = None,
                   pot: PiecewiseConstantPotential | None = None) -> RangeDiagnostic:
    """Support-radius estimates ``a_l = (2l+1)/(e k) |delta_l|^{1/(2l)}``.

    At ``k = 1`` this is the textbook form; dividing by ``k`` keeps the limit
    equal to the support radius at any energy.  ``radius`` fixes the ``a``
    used to fit ``c = max_l |delta_l| ((2l+1)/(k a e))^{2l}`` over the
    window; by default the last finite estimate is used.  If ``pot`` is given
    and changes sign over its outer 10%, a warning is attached.
    """
    deltas = np.asarray(shifts.deltas)
    k = float(shifts.k)
    ls = np.array([l for l in l_window if 1 <= l < deltas.size], dtype=int)
    est = np.full(ls.size, np.nan)
    undefined = []
    for i, l in enumerate(ls):
        mag = abs(deltas[l])
        if mag > TINY_DELTA:
            est[i] = (2 * l + 1) / (math.e * k) * math.exp(math.log(mag) / (2 * l))
        else:
            undefined.append(int(l))
    if not np.any(np.isfinite(est)):
        raise EmptyWindow("no phase shift in the window is usable for the range formula")

    good = np.isfinite(est)
    a = float(est[good][-1]) if radius is None else float(radius)
    logc = [
        math.log(abs(deltas[l])) + 2 * l * math.log((2 * l + 1) / (k * a * math.e))
        for l in ls[good]
    ]
    diag = RangeDiagnostic(ls, est, a, math.exp(max(logc)), k, undefined)

    if pot is not None:
        edge = pot(np.linspace(0.9 * pot.radius, pot.radius * (1 - 1e-12), 64))
        if np.any(edge > 0) and np.any(edge < 0):
            diag.warning = "potential changes sign near its support edge; range formula hypothesis fails"
            warnings.warn(diag.warning, RuntimeWarning, stacklevel=2)
    return diag


# -- linear algebra diagnostics ---------------------------------------------


def condition_estimate(J, iters: int = 200, seed: int = 0) -> tuple[float, float]:
    """Largest and smallest singular values by power / inverse iteration on J^T J.

    The inverse iteration solves with :func:`gauss_solve_truncated` (no
    truncation), so no SVD is involved.
    """
    J = np.asarray(J, dtype=float)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(J.shape[1])
    for _ in range(iters):
        x = J.T @ (J @ x)
        x /= np.linalg.norm(x)
    smax = float(np.linalg.norm(J @ x))

    y = rng.standard_normal(J.shape[1])
    for _ in range(iters):
        z, _ = gauss_solve_truncated(J.T, y, 0.0)
        y, _ = gauss_solve_truncated(J, z, 0.0)
        y /= np.linalg.norm(y)
    smin = float(np.linalg.norm(J @ y))
    return smax, smin


def min_complete_pivot(J) -> float:
    """Smallest pivot magnitude met by complete-pivoting elimination of ``J``."""
    a = np.array(J, dtype=float)
    n = a.shape[0]
    smallest = math.inf
    for p in range(n):
        block = np.abs(a[p:, p:])
        i, j = divmod(int(np.argmax(block)), n - p)
        i += p
        j += p
        a[[p, i], :] = a[[i, p], :]
        a[:, [p, j]] = a[:, [j, p]]
        smallest = min(smallest, abs(a[p, p]))
        if a[p, p] == 0.0:
            break
        m = a[p + 1 :, p] / a[p, p]
        a[p + 1 :, p:] -= np.outer(m, a[p, p:])
    return float(smallest)


def wronskian_sweep(ls=range(0, 51), zs=(1e-3, 0.1, 1.0, 10.0, 50.0, 200.0)) -> dict:
    """Max Wronskian and ODE-residual errors of the Riccati-Bessel evaluator."""
    w_err = 0.0
    d_err = 0.0
    for z in zs:
        for l in ls:
            rb = riccati_bessel(l, z)
            w_err = max(w_err, abs(rb.wronskian - 1.0))
            # first derivative cross-checked through the lowering relation
            # u_l' = (l+1)/z u_l - u_{l+1}
            nxt = riccati_bessel(l + 1, z)
            implied = (l + 1) / z * rb.u - nxt.u
            scale = max(abs(rb.u1), abs(nxt.u), (l + 1) / z * abs(rb.u), 1e-300)
            d_err = max(d_err, abs(implied - rb.u1) / scale)
    return {"wronskian_max_abs_err": w_err, "derivative_identity_max_rel_err": d_err}
