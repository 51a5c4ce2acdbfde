"""Random phase shifts between the sending and receiving terms.

For every time sample ``t`` and every fuzzed dimension ``i`` an independent
phase ``phi ~ U(0, L)`` is drawn and the redundancy becomes
``P_i(t)**2 - Q_i(t + phi)**2``.  ``L`` (the fuzzy interval) is measured in
time units; the natural scale is ``pi / (2r)`` and the effect saturates at
``3*pi / (2r)``.

Draws come from numpy's PCG64 seeded through ``SeedSequence(seed,
spawn_key=(block,))`` for consecutive blocks of ``BLOCK`` samples, so a
sample's phases depend only on the seed and its index, never on how the
work is partitioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ks_2samp

from .closedform import ClosedFormSolution, RedundancySeries, eval_arrays

__all__ = [
    "RNG_ALGORITHM",
    "BLOCK",
    "FuzzyConfig",
    "SaturationReport",
    "phase_draws",
    "fuzzy_redundancy",
    "saturation_check",
    "interval_from_multiple",
]

RNG_ALGORITHM = "numpy.PCG64/SeedSequence(seed, spawn_key=(block,))/block=4096"
BLOCK = 4096


@dataclass(frozen=True)
class FuzzyConfig:
    interval_length: float
    component_mask: frozenset[int] = field(default_factory=lambda: frozenset({1, 2, 3}))
    seed: int = 0
    # test hook: one phase per sample shared by all masked dimensions
    shared_phase: bool = False

    def __post_init__(self):
        length = float(self.interval_length)
        if not math.isfinite(length) or length < 0:
            raise ValueError(f"interval_length must be finite and >= 0, got {length}")
        mask = frozenset(int(i) for i in self.component_mask)
        if not mask:
            raise ValueError("component_mask must name at least one dimension")
        if not mask <= {1, 2, 3}:
            raise ValueError(f"component_mask entries must be 1, 2 or 3, got {sorted(mask)}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "interval_length", length)
        object.__setattr__(self, "component_mask", mask)
        object.__setattr__(self, "seed", int(self.seed))


def interval_from_multiple(multiple: float, r: float) -> float:
    """Length of ``multiple * pi / (2r)``, e.g. ``3`` gives the saturation cap."""
    if r <= 0:
        raise ValueError("r must be positive")
    return multiple * math.pi / (2.0 * r)


def phase_draws(n: int, seed: int) -> np.ndarray:
    """Uniform ``[0, 1)`` variates of shape ``(n, 3)``, one row per sample."""
    out = np.empty((n, 3))
    for block, start in enumerate(range(0, n, BLOCK)):
        ss = np.random.SeedSequence(seed, spawn_key=(block,))
        rng = np.random.Generator(np.random.PCG64(ss))
        stop = min(start + BLOCK, n)
        out[start:stop] = rng.random((BLOCK, 3))[: stop - start]
    return out


def fuzzy_redundancy(sol: ClosedFormSolution, times, cfg: FuzzyConfig) -> RedundancySeries:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or not np.all(np.isfinite(t)):
        raise ValueError("times must be a finite 1-D sequence")
    if sol.degenerate and cfg.interval_length > 0:
        raise ValueError("a phase shift is meaningless for a constant (r = 0) solution")
    u = phase_draws(len(t), cfg.seed)
    if cfg.shared_phase:
        u = np.repeat(u[:, :1], 3, axis=1)
    p, q = eval_arrays(sol, t)
    if cfg.interval_length > 0:
        # unshifted columns keep the noiseless values bit for bit
        shifted = sorted(i - 1 for i in cfg.component_mask)
        _, q_shift = eval_arrays(sol, t[:, None] + u[:, shifted] * cfg.interval_length)
        for col, i in enumerate(shifted):
            q[:, i] = q_shift[:, col, i]
    return RedundancySeries(t, p * p - q * q)


@dataclass(frozen=True)
class SaturationReport:
    lengths: tuple[float, float]
    ks_statistic: float
    means: tuple[float, float]
    variances: tuple[float, float]


def saturation_check(sol: ClosedFormSolution, times, seed: int,
                     lengths: tuple[float, float],
                     mask=frozenset({1, 2, 3})) -> SaturationReport:
    """Two-sample KS distance between fuzzed totals at two interval lengths.

    Both runs share ``seed`` so they differ only through the interval length.
    """
    if sol.degenerate:
        raise ValueError("a phase shift is meaningless for a constant (r = 0) solution")
    cap = 3.0 * math.pi / (2.0 * sol.r)
    if min(lengths) < cap * (1 - 1e-12):
        raise ValueError(f"both lengths must be >= 3*pi/(2r) = {cap:g}")
    return compare_lengths(sol, times, seed, lengths, mask)


def compare_lengths(sol, times, seed, lengths, mask=frozenset({1, 2, 3})) -> SaturationReport:
    """As :func:`saturation_check` without the lower bound on the lengths."""
    totals = [
        fuzzy_redundancy(sol, times, FuzzyConfig(L, mask, seed)).total for L in lengths
    ]
    ks = 0.0 if lengths[0] == lengths[1] else float(ks_2samp(*totals).statistic)
    return SaturationReport(
        lengths=(float(lengths[0]), float(lengths[1])),
        ks_statistic=ks,
        means=tuple(float(x.mean()) for x in totals),
        variances=tuple(float(x.var()) for x in totals),
    )
