"""Nonlinear P/Q dynamics and a fixed-step RK4 integrator.

The equations of motion are

    dP/dt = -2g (P x Q),    dQ/dt = +2g (P x Q)

i.e. the vector Lotka-Volterra system with its variation terms set to zero.
The integrator is deliberately simple (classical RK4, fixed step) so that
trajectories are bit-reproducible; it is the numerical reference against
which the closed-form solution is checked.

All array routines accept a leading batch shape, so many initial states can
be stepped together: ``p`` and ``q`` have shape ``(..., 3)`` and ``g``/``dt``
broadcast against ``(...)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import HelixState, Vec3, _check_g

__all__ = [
    "DEFAULT_DT",
    "DEFAULT_HORIZON",
    "IntegrationError",
    "Trajectory",
    "DriftReport",
    "rhs",
    "rhs_arrays",
    "rk4_arrays",
    "integrate",
    "invariant_drift",
    "zero_crossings",
]

DEFAULT_DT = 0.01
DEFAULT_HORIZON = 50.0


class IntegrationError(ArithmeticError):
    """Raised when a trajectory leaves the finite reals."""

    def __init__(self, step: int, message: str):
        super().__init__(message)
        self.step = step


def _cross_last(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # np.cross is much slower on tiny arrays; spell it out on the last axis
    out = np.empty(np.broadcast_shapes(u.shape, v.shape))
    out[..., 0] = u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1]
    out[..., 1] = u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2]
    out[..., 2] = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    return out


def rhs_arrays(p: np.ndarray, q: np.ndarray, g) -> tuple[np.ndarray, np.ndarray]:
    k = 2.0 * np.asarray(g, dtype=float)[..., None] * _cross_last(p, q)
    return -k, k


def rhs(state: HelixState, g: float) -> tuple[Vec3, Vec3]:
    """Time derivatives ``(dP, dQ)`` at ``state``; ``dP + dQ == 0``."""
    g = _check_g(g)
    dp, dq = rhs_arrays(state.p.as_array(), state.q.as_array(), g)
    return Vec3(*dp.tolist()), Vec3(*dq.tolist())


def rk4_arrays(p0, q0, g, dt, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Integrate a batch of states; returns arrays of shape ``(n_steps+1, ..., 3)``.

    Index 0 holds the initial states unchanged.  Non-finite values are not
    checked here; see :func:`integrate`.
    """
    p = np.array(p0, dtype=float)
    q = np.array(q0, dtype=float)
    g = np.broadcast_to(np.asarray(g, dtype=float), p.shape[:-1])
    h = np.broadcast_to(np.asarray(dt, dtype=float), p.shape[:-1])[..., None]
    ps = np.empty((n_steps + 1,) + p.shape)
    qs = np.empty((n_steps + 1,) + q.shape)
    ps[0], qs[0] = p, q
    half = 0.5 * h
    sixth = h / 6.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, n_steps + 1):
            k1p, k1q = rhs_arrays(p, q, g)
            k2p, k2q = rhs_arrays(p + half * k1p, q + half * k1q, g)
            k3p, k3q = rhs_arrays(p + half * k2p, q + half * k2q, g)
            k4p, k4q = rhs_arrays(p + h * k3p, q + h * k3q, g)
            p = p + sixth * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            q = q + sixth * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
            ps[n], qs[n] = p, q
    return ps, qs


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of the P/Q system.

    ``p`` and ``q`` are ``(n, 3)`` arrays aligned with ``times``; the
    arrays are made read-only on construction.
    """

    times: np.ndarray
    p: np.ndarray
    q: np.ndarray
    g: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if times.ndim != 1 or p.shape != (len(times), 3) or q.shape != p.shape:
            raise ValueError("times, p and q must have lengths n, (n, 3), (n, 3)")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        for name, arr in (("times", times), ("p", p), ("q", q)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.times)

    @property
    def states(self) -> list[HelixState]:
        return [HelixState.from_arrays(p, q) for p, q in zip(self.p, self.q)]

    def redundancy(self) -> np.ndarray:
        """Per-dimension redundancy ``P_i**2 - Q_i**2``, shape ``(n, 3)``."""
        return self.p * self.p - self.q * self.q


def integrate(
    state0: HelixState,
    g: float,
    dt: float = DEFAULT_DT,
    n_steps: int = int(DEFAULT_HORIZON / DEFAULT_DT),
) -> Trajectory:
    """Integrate from ``state0`` with classical RK4 at fixed step ``dt``.

    Returns ``n_steps + 1`` samples at ``t = k*dt``.  Raises
    :class:`IntegrationError` naming the first step whose state is not
    finite (usually ``dt`` too large for the given ``g`` and amplitudes).
    """
    g = _check_g(g)
    dt = float(dt)
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be a positive finite number, got {dt}")
    if int(n_steps) != n_steps or n_steps < 1:
        raise ValueError(f"n_steps must be a positive integer, got {n_steps}")
    n_steps = int(n_steps)
    ps, qs = rk4_arrays(state0.p.as_array(), state0.q.as_array(), g, dt, n_steps)
    finite = np.isfinite(ps).all(axis=1) & np.isfinite(qs).all(axis=1)
    if not finite.all():
        step = int(np.argmin(finite))
        raise IntegrationError(
            step,
            f"non-finite state at step {step} (t={step * dt:g}); "
            f"dt={dt:g} is too large for g={g:g} and these amplitudes",
        )
    times = np.arange(n_steps + 1) * dt
    return Trajectory(times, ps, qs, g)


@dataclass(frozen=True)
class DriftReport:
    """Maximum absolute deviation of each invariant from its t=0 value."""

    c1: float
    c2: float
    sums: tuple[float, float, float]
    c4: float

    def max(self) -> float:
        return max(self.c1, self.c2, self.c4, *self.sums)


def _invariants(p: np.ndarray, q: np.ndarray, g: float):
    s = p + q
    n = -2.0 * g * s[0]
    return (p * p).sum(-1), (q * q).sum(-1), s, p @ n


def invariant_drift(traj: Trajectory) -> DriftReport:
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    c1, c2, s, c4 = _invariants(traj.p, traj.q, traj.g)
    return DriftReport(
        c1=float(np.max(np.abs(c1 - c1[0]))),
        c2=float(np.max(np.abs(c2 - c2[0]))),
        sums=tuple(float(x) for x in np.max(np.abs(s - s[0]), axis=0)),
        c4=float(np.max(np.abs(c4 - c4[0]))),
    )


def zero_crossings(x) -> int:
    """Number of sign changes of ``x - mean(x)`` (exact zeros are skipped)."""
    x = np.asarray(x, dtype=float)
    sign = np.sign(x - x.mean())
    sign = sign[sign != 0]
    return int(np.count_nonzero(sign[1:] != sign[:-1]))
