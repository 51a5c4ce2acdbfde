"""Least-squares Fourier series fitting and harmonic power.

A series ``y(t)`` is approximated by

    y ~ A + sum_{k=1..N} B_k cos(k w (t - t0)) + D_k sin(k w (t - t0))

and the power of harmonic ``k`` is ``V_k = B_k**2 + D_k**2``.  The design
matrix is solved with an SVD-based least-squares routine, never through the
normal equations.  With more unknowns than samples the minimum-norm
solution is returned and the model is flagged as interpolating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FourierModel", "Spectrum", "fit", "reconstruct", "spectrum",
           "default_terms", "default_omega0", "design_matrix"]


@dataclass(frozen=True, eq=False)
class FourierModel:
    offset: float
    b: np.ndarray
    d: np.ndarray
    omega0: float
    t0: float
    interpolating: bool = False
    rss: float = 0.0
    n_samples: int = 0
    # linear trend removed before fitting (slope, intercept at t0), if any
    trend: tuple[float, float] | None = None

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).copy()
        d = np.asarray(self.d, dtype=float).copy()
        if b.ndim != 1 or b.shape != d.shape or len(b) < 1:
            raise ValueError("need N >= 1 harmonic pairs")
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        b.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @property
    def n_terms(self) -> int:
        return len(self.b)

    @property
    def harmonics(self) -> list[tuple[float, float]]:
        return list(zip(self.b.tolist(), self.d.tolist()))


@dataclass(frozen=True, eq=False)
class Spectrum:
    powers: np.ndarray
    # None when the total power is zero
    normalized: np.ndarray | None

    @property
    def peak(self) -> int:
        """1-based index of the strongest harmonic."""
        return int(np.argmax(self.powers)) + 1


def default_omega0(t) -> float:
    t = np.asarray(t, dtype=float)
    n = len(t)
    span = float(t.max() - t.min())
    if n < 2 or span <= 0:
        raise ValueError("need at least 2 distinct sample times")
    return 2.0 * math.pi * (n - 1) / (n * span)


def default_terms(n_samples: int) -> int:
    return max(1, (n_samples - 1) // 2)


def design_matrix(t, n_terms: int, omega0: float, t0: float) -> np.ndarray:
    phase = omega0 * (np.asarray(t, dtype=float) - t0)
    k = np.arange(1, n_terms + 1)
    arg = phase[:, None] * k
    return np.hstack([np.ones((len(phase), 1)), np.cos(arg), np.sin(arg)])


def fit(t, y, n_terms: int | None = None, omega0: float | None = None,
        t0: float | None = None, detrend: bool = False,
        window: bool = False) -> FourierModel:
    """Fit a Fourier series to samples ``(t, y)``.

    ``omega0`` defaults to ``2*pi / T`` with ``T = span * n / (n - 1)``, i.e.
    ``n * dt`` on an even grid, so the first and last samples do not share a
    phase; ``t0`` defaults to ``t_min``.
    ``n_terms`` defaults to ``(n - 1) // 2``, the largest fully determined
    order.  ``detrend`` removes a least-squares line first (kept in the model
    and added back by :func:`reconstruct`); ``window`` multiplies the
    (detrended) data by a Hann taper before fitting.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.ndim != 1 or t.shape != y.shape:
        raise ValueError("t and y must be 1-D sequences of equal length")
    if len(t) < 2:
        raise ValueError("need at least 2 samples")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise ValueError("samples must be finite")
    if len(np.unique(t)) != len(t):
        raise ValueError("duplicate timestamps")
    if n_terms is None:
        n_terms = default_terms(len(t))
    if int(n_terms) != n_terms or n_terms < 1:
        raise ValueError(f"n_terms must be a positive integer, got {n_terms}")
    n_terms = int(n_terms)
    if t0 is None:
        t0 = float(t.min())
    if omega0 is None:
        omega0 = default_omega0(t)
    if not (math.isfinite(omega0) and omega0 > 0):
        raise ValueError(f"omega0 must be positive, got {omega0}")

    trend = None
    target = y
    if detrend:
        slope, intercept = np.polyfit(t - t0, y, 1)
        trend = (float(slope), float(intercept))
        target = y - (slope * (t - t0) + intercept)
    if window:
        order = np.argsort(t)
        taper = np.empty_like(t)
        taper[order] = np.hanning(len(t))
        target = target * taper

    A = design_matrix(t, n_terms, omega0, t0)
    coef, _, _, _ = np.linalg.lstsq(A, target, rcond=None)
    resid = target - A @ coef
    return FourierModel(
        offset=float(coef[0]),
        b=coef[1:n_terms + 1],
        d=coef[n_terms + 1:],
        omega0=float(omega0),
        t0=float(t0),
        interpolating=2 * n_terms + 1 > len(t),
        rss=float(resid @ resid),
        n_samples=len(t),
        trend=trend,
    )


def reconstruct(model: FourierModel, t):
    """Evaluate the fitted series at ``t`` (scalar or array)."""
    tt = np.asarray(t, dtype=float)
    flat = np.atleast_1d(tt).ravel()
    A = design_matrix(flat, model.n_terms, model.omega0, model.t0)
    coef = np.concatenate([[model.offset], model.b, model.d])
    out = A @ coef
    if model.trend is not None:
        slope, intercept = model.trend
        out = out + slope * (flat - model.t0) + intercept
    if tt.ndim == 0:
        return float(out[0])
    return out.reshape(tt.shape)


def spectrum(model: FourierModel) -> Spectrum:
    powers = model.b ** 2 + model.d ** 2
    total = powers.sum()
    normalized = powers / total if total > 0 else None
    return Spectrum(powers, normalized)
