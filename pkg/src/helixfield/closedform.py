"""Analytic solution of the P/Q system.

Because ``P_i + Q_i`` is conserved, substituting ``Q = s - P`` turns the
system into the linear rotation ``dP/dt = P x n`` with ``n = (a, b, c) =
-2g s``.  Its solution is

    P(t) = c0 n + r k cos(rt) + (k x n) sin(rt),     r = |n|

with ``c0 = (n . P(0)) / r**2`` and ``k = (P(0) - c0 n) / r``; ``k`` is
orthogonal to ``n`` by construction.  ``Q(t) = s - P(t)``.

Since ``Q_i = s_i - P_i``, each redundancy component ``P_i**2 - Q_i**2 =
2 s_i P_i - s_i**2`` is a constant plus a single oscillation at ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import HelixState, Vec3, conserved, cross, derive_abc

__all__ = ["ClosedFormSolution", "RedundancySeries", "solve", "eval_state",
           "eval_arrays", "redundancy_series"]


@dataclass(frozen=True)
class ClosedFormSolution:
    a: float
    b: float
    c: float
    r: float
    alpha: float
    beta: float
    gamma: float
    p0: Vec3
    q0: Vec3
    # P0 x Q0 == 0 exactly: a fixed point, evaluated as a constant
    stationary: bool = False
    # None for the degenerate r == 0 (constant-in-time) solution
    c0: float | None = None
    k1: float | None = None
    k2: float | None = None
    k3: float | None = None

    @property
    def degenerate(self) -> bool:
        return self.r == 0.0

    @property
    def period(self) -> float:
        return math.inf if self.degenerate else 2.0 * math.pi / self.r


@dataclass(frozen=True, eq=False)
class RedundancySeries:
    """Per-dimension redundancy ``(n, 3)`` sampled at ``times`` plus its total."""

    times: np.ndarray
    components: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.components.sum(axis=1)


def solve(state0: HelixState, g: float) -> ClosedFormSolution:
    cs = conserved(state0, g)
    a, b, c, r = derive_abc(state0, g)
    common = dict(a=a, b=b, c=c, r=r, alpha=cs.alpha, beta=cs.beta,
                  gamma=cs.gamma, p0=state0.p, q0=state0.q)
    if r == 0.0:
        return ClosedFormSolution(**common, stationary=True)
    p1, p2, p3 = state0.p
    c0 = (a * p1 + b * p2 + c * p3) / (r * r)
    return ClosedFormSolution(
        **common,
        stationary=cross(state0.p, state0.q) == (0.0, 0.0, 0.0),
        c0=c0,
        k1=(p1 - a * c0) / r,
        k2=(p2 - b * c0) / r,
        k3=(p3 - c * c0) / r,
    )


def eval_arrays(sol: ClosedFormSolution, times) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised evaluation; returns ``P`` and ``Q`` with shape ``times.shape + (3,)``."""
    t = np.asarray(times, dtype=float)
    s = np.array([sol.alpha, sol.beta, sol.gamma])
    if sol.stationary:
        p = np.broadcast_to(sol.p0.as_array(), t.shape + (3,)).copy()
        q = np.broadcast_to(sol.q0.as_array(), t.shape + (3,)).copy()
        return p, q
    a, b, c, r = sol.a, sol.b, sol.c, sol.r
    k1, k2, k3 = sol.k1, sol.k2, sol.k3
    const = np.array([a, b, c]) * sol.c0
    cos_amp = r * np.array([k1, k2, k3])
    sin_amp = np.array([c * k2 - b * k3, a * k3 - c * k1, b * k1 - a * k2])
    rt = (r * t)[..., None]
    p = const + cos_amp * np.cos(rt) + sin_amp * np.sin(rt)
    return p, s - p


def eval_state(sol: ClosedFormSolution, t: float) -> HelixState:
    p, q = eval_arrays(sol, float(t))
    return HelixState.from_arrays(p, q)


def redundancy_series(sol: ClosedFormSolution, times) -> RedundancySeries:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or not np.all(np.isfinite(t)):
        raise ValueError("times must be a finite 1-D sequence")
    p, q = eval_arrays(sol, t)
    return RedundancySeries(t, p * p - q * q)
