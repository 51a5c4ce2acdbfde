"""Core helix types and the elementary vector / redundancy algebra.

A helix state is a pair of three-component vectors ``P`` (sending) and
``Q`` (receiving), indexed by the dimensions University, Industry and
Government.  Redundancy per dimension is ``P_i**2 - Q_i**2`` (bits-scale,
no unit conversion); the total is the sum over the three dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "Vec3",
    "HelixState",
    "ConservedSet",
    "PRESETS",
    "cross",
    "dot",
    "conserved",
    "derive_abc",
    "redundancy_components",
]


class Vec3(NamedTuple):
    """Three-component real vector over the (U, I, G) helix dimensions."""

    u: float
    i: float
    g_dim: float

    @classmethod
    def of(cls, values) -> "Vec3":
        vals = [float(v) for v in values]
        if len(vals) != 3:
            raise ValueError(f"Vec3 needs exactly 3 components, got {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"Vec3 components must be finite, got {vals}")
        return cls(*vals)

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class HelixState:
    """The (P, Q) pair at one instant."""

    p: Vec3
    q: Vec3

    def __post_init__(self):
        # normalise lists/arrays into validated Vec3 instances
        object.__setattr__(self, "p", Vec3.of(self.p))
        object.__setattr__(self, "q", Vec3.of(self.q))

    @classmethod
    def from_arrays(cls, p, q) -> "HelixState":
        return cls(Vec3.of(p), Vec3.of(q))


@dataclass(frozen=True)
class ConservedSet:
    """Quantities that stay constant along an exact trajectory.

    ``alpha``, ``beta``, ``gamma`` are the componentwise sums ``P_i + Q_i``;
    ``c1 = |P|**2`` and ``c2 = |Q|**2`` are the two sphere radii squared,
    ``c4 = a*P1 + b*P2 + c*P3`` is the plane invariant.  ``c`` is derived.
    """

    alpha: float
    beta: float
    gamma: float
    c1: float
    c2: float
    c4: float

    @property
    def c(self) -> float:
        return self.c2 - self.c1


# Built-in initial configurations, both at g = 0.2; they share P and differ in Q.
PRESETS: dict[str, tuple[HelixState, float]] = {
    "fig3": (HelixState(Vec3(0.4, 1.4, 0.7), Vec3(2.1, 1.1, 0.9)), 0.2),
    "eq16": (HelixState(Vec3(0.4, 1.4, 0.7), Vec3(0.2, 0.87, 0.9)), 0.2),
}


def cross(u, v) -> Vec3:
    u1, u2, u3 = u
    v1, v2, v3 = v
    return Vec3(u2 * v3 - u3 * v2, u3 * v1 - u1 * v3, u1 * v2 - u2 * v1)


def dot(u, v) -> float:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _check_g(g: float) -> float:
    g = float(g)
    if not math.isfinite(g):
        raise ValueError(f"coupling coefficient g must be finite, got {g}")
    return g


def conserved(state: HelixState, g: float) -> ConservedSet:
    """Evaluate every invariant of the coupled system at ``state``."""
    g = _check_g(g)
    p, q = state.p, state.q
    alpha, beta, gamma = p[0] + q[0], p[1] + q[1], p[2] + q[2]
    a, b, c = -2.0 * g * alpha, -2.0 * g * beta, -2.0 * g * gamma
    return ConservedSet(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        c1=dot(p, p),
        c2=dot(q, q),
        c4=a * p[0] + b * p[1] + c * p[2],
    )


def derive_abc(state0: HelixState, g: float) -> tuple[float, float, float, float]:
    """Return the reduced-system coefficients ``(a, b, c, r)``.

    ``a = -2g(P1+Q1)`` and cyclically, ``r = sqrt(a^2 + b^2 + c^2)`` is the
    angular frequency of the oscillation.  ``r == 0`` is legal and means the
    state does not move.
    """
    cs = conserved(state0, g)
    a, b, c = -2.0 * g * cs.alpha, -2.0 * g * cs.beta, -2.0 * g * cs.gamma
    return a, b, c, math.sqrt(a * a + b * b + c * c)


def redundancy_components(state: HelixState) -> Vec3:
    p, q = state.p, state.q
    return Vec3(
        p[0] * p[0] - q[0] * q[0],
        p[1] * p[1] - q[1] * q[1],
        p[2] * p[2] - q[2] * q[2],
    )
