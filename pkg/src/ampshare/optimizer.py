"""Sum-rate optimal H-K power allocation and comparison baselines.

Outside the weak regime the optimal split puts each user's full power on a
single layer and the sum-rate has a closed form.  In the weak regime the
optimum is found by evaluating the objective on a finite candidate set that
is guaranteed to contain it (see :func:`weak_mode_candidates`).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from ._backend import grid_search
from .channel import (
    InterferenceMode,
    PowerSplit,
    classify_mode,
    link_budget,
    normalized_sum_rate,
    split_sum_rate,
)

__all__ = [
    "AllocationResult",
    "WeakModeCoefficients",
    "closed_form_sum_rate",
    "weak_mode_coefficients",
    "weak_mode_candidates",
    "weak_mode_split",
    "optimize",
    "brute_force_split",
    "etw_split",
    "baseline_rates",
]

logger = logging.getLogger(__name__)

DEFAULT_GRID_N = 512


@dataclass(frozen=True)
class AllocationResult:
    mode: InterferenceMode
    split: PowerSplit
    sum_rate: float


@dataclass(frozen=True)
class WeakModeCoefficients:
    """Coefficients of the weak-regime line ``p2p = alpha * p1p + beta``.

    ``rho`` is the stationary point of the sum-rate along that line.  Any
    coefficient whose defining expression is undefined is ``None``.
    """

    alpha: Optional[float]
    beta: Optional[float]
    rho: Optional[float]

    @property
    def degenerate(self):
        return self.alpha is None or self.beta is None or self.alpha == 0.0


def closed_form_sum_rate(lb, mode):
    """Table value of the optimal sum-rate; ``None`` for the weak regime."""
    s1, s2, i1, i2 = lb.snr1, lb.snr2, lb.inr1, lb.inr2
    log2 = math.log2
    if mode is InterferenceMode.VERY_STRONG:
        return log2(1 + s1) + log2(1 + s2)
    if mode is InterferenceMode.STRONG:
        return min(log2(1 + s2 + i2), log2(1 + s1 + i1))
    if mode is InterferenceMode.MIXED1:
        return min(log2(1 + s1 + i1), log2(1 + s1) + log2(1 + s2 / (1 + i2)))
    if mode is InterferenceMode.MIXED2:
        return min(log2(1 + s2 + i2), log2(1 + s1 / (1 + i1)) + log2(1 + s2))
    if mode is InterferenceMode.VERY_WEAK:
        return log2(1 + s1 / (1 + i1)) + log2(1 + s2 / (1 + i2))
    return None


def weak_mode_coefficients(gains, budget):
    g11, g12, g21, g22 = gains.g11, gains.g12, gains.g21, gains.g22
    p1, p2, n0 = budget.p1, budget.p2, budget.n0
    det = g11 * g22 - g12 * g21
    den = det * p1 + (g22 - g12) * n0
    if den == 0.0:
        return WeakModeCoefficients(None, None, None)
    alpha = (det * p2 + (g11 - g21) * n0) / den
    beta = ((g22 - g12) * p2 + (g21 - g11) * p1) * n0 / den
    rho = None
    if alpha != 0.0 and det != 0.0:
        arg = (g11 * g22) / (g21 * g12) * (g12 - g22) * (g21 - g11) / alpha
        if arg >= 0.0:
            rho = n0 * (math.sqrt(arg) / det - (g22 - g12) / det)
    return WeakModeCoefficients(alpha, beta, rho)


def _clamp(v, lo, hi):
    return min(max(v, lo), hi)


def _real_roots_in_unit(poly):
    poly = np.trim_zeros(np.asarray(poly, dtype=float), "b")
    if poly.size < 2 or not np.all(np.isfinite(poly)):
        return []
    deriv = P.polyder(poly)
    out = []
    for r in P.polyroots(poly):
        if abs(r.imag) > 1e-7 * (1.0 + abs(r.real)):
            continue
        t = r.real
        for _ in range(3):
            slope = P.polyval(t, deriv)
            if slope == 0.0:
                break
            t -= P.polyval(t, poly) / slope
        if 0.0 < t < 1.0:
            out.append(t)
    return out


def _segment_points(lb, start, end):
    """Candidate points on a segment in private-power-fraction coordinates.

    On the segment every min term ``N_k`` is quadratic in the segment
    parameter, so the points where two terms cross and the stationary
    points of each term against ``log(u*v)`` are polynomial roots.
    """
    (x0, y0), (x1, y1) = start, end
    dx, dy = x1 - x0, y1 - y0
    s1, s2, i1, i2 = lb.snr1, lb.snr2, lb.inr1, lb.inr2

    def aff(cx, cy, c):
        return np.array([c + cx * x0 + cy * y0, cx * dx + cy * dy])

    terms = [
        (1.0 + s1 + i1) * aff(i2, s2, 1.0),
        (1.0 + i2 + s2) * aff(s1, i1, 1.0),
        P.polymul(aff(0.0, i1, 1.0 + s1), aff(i2, 0.0, 1.0 + s2)),
        P.polymul(aff(0.0, s2, 1.0 + i2), aff(s1, 0.0, 1.0 + i1)),
    ]
    uv = P.polymul(aff(0.0, i1, 1.0), aff(i2, 0.0, 1.0))
    duv = P.polyder(uv)
    ts = [0.0, 1.0]
    for k, nk in enumerate(terms):
        for other in terms[k + 1:]:
            ts.extend(_real_roots_in_unit(P.polysub(nk, other)))
        stationary = P.polysub(P.polymul(P.polyder(nk), uv), P.polymul(nk, duv))
        ts.extend(_real_roots_in_unit(stationary))
    return [(_clamp(x0 + t * dx, 0.0, 1.0), _clamp(y0 + t * dy, 0.0, 1.0)) for t in ts]


def _line_segment(alpha, beta):
    """Part of ``y = alpha*x + beta`` inside the unit square, or None."""
    lo, hi = 0.0, 1.0
    if alpha > 0:
        lo, hi = max(lo, -beta / alpha), min(hi, (1.0 - beta) / alpha)
    elif alpha < 0:
        lo, hi = max(lo, (1.0 - beta) / alpha), min(hi, -beta / alpha)
    elif not 0.0 <= beta <= 1.0:
        return None
    if not lo < hi:
        return None
    return (lo, alpha * lo + beta), (hi, alpha * hi + beta)


def weak_mode_candidates(gains, budget):
    """Candidate splits for the weak regime as ``(PowerSplit, origin)`` pairs.

    ``origin`` is ``"closed-form"`` for the table candidates
    ``p1p in {0, -beta/alpha, rho, p1}`` mapped onto the linear relation,
    ``"line"`` for the remaining critical points on that line (where a
    further MAC sum bound starts to bind), and ``"edge"`` for the critical
    points and corners of the budget box.  The sum-rate maximum over the box
    is attained at one of these points.
    """
    p1, p2 = budget.p1, budget.p2
    lb = link_budget(gains, budget)
    coef = weak_mode_coefficients(gains, budget)
    out = []

    if not coef.degenerate:
        alpha, beta = coef.alpha, coef.beta
        seeds = [0.0, -beta / alpha, p1]
        if coef.rho is not None:
            seeds.append(coef.rho)
        for x in seeds:
            if not math.isfinite(x):
                continue
            x = _clamp(x, 0.0, p1)
            y = _clamp(alpha * x + beta, 0.0, p2)
            out.append((PowerSplit(x, y), "closed-form"))
        # same line in power-fraction coordinates
        seg = _line_segment(alpha * p1 / p2, beta / p2)
        if seg is not None:
            for fx, fy in _segment_points(lb, *seg):
                out.append((PowerSplit(min(fx * p1, p1), min(fy * p2, p2)), "line"))

    corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    for a, b in zip(corners, corners[1:] + corners[:1]):
        for fx, fy in _segment_points(lb, a, b):
            out.append((PowerSplit(min(fx * p1, p1), min(fy * p2, p2)), "edge"))
    return out


def weak_mode_split(gains, budget):
    """Best candidate split for a weak-regime channel.

    Degenerate coefficients only drop the affected candidates; the box
    candidates are always present so this never fails.
    """
    lb = link_budget(gains, budget)
    best, best_val, best_origin = None, -math.inf, None
    for split, origin in weak_mode_candidates(gains, budget):
        val = normalized_sum_rate(lb, split.p1p / budget.p1, split.p2p / budget.p2)
        if val > best_val:
            best, best_val, best_origin = split, val, origin
    interior = 0.0 < best.p1p < budget.p1 and 0.0 < best.p2p < budget.p2
    if not interior:
        logger.debug(
            "weak-mode optimum on the budget boundary (%s): split=%s budget=%s",
            best_origin, best, budget,
        )
    return best


def optimize(gains, budget):
    lb = link_budget(gains, budget)
    mode = classify_mode(lb)
    p1, p2 = budget.p1, budget.p2
    if mode in (InterferenceMode.VERY_STRONG, InterferenceMode.STRONG):
        split = PowerSplit(0.0, 0.0)
    elif mode is InterferenceMode.MIXED1:
        split = PowerSplit(p1, 0.0)
    elif mode is InterferenceMode.MIXED2:
        split = PowerSplit(0.0, p2)
    elif mode is InterferenceMode.VERY_WEAK:
        split = PowerSplit(p1, p2)
    else:
        split = weak_mode_split(gains, budget)
    return AllocationResult(mode, split, split_sum_rate(gains, budget, split))


def brute_force_split(gains, budget, grid_n=DEFAULT_GRID_N):
    """Grid-search oracle over ``{i*p1/(n-1)} x {j*p2/(n-1)}``."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    g, b = gains, budget
    best, i, j = grid_search(g.g11, g.g12, g.g21, g.g22, b.p1, b.p2, b.n0, int(grid_n))
    last = grid_n - 1
    split = PowerSplit(
        b.p1 if i == last else i * b.p1 / last,
        b.p2 if j == last else j * b.p2 / last,
    )
    return AllocationResult(classify_mode(link_budget(g, b)), split, float(best))


def etw_split(gains, budget):
    """Private power that reaches the other receiver at noise level (INR 1)."""
    return PowerSplit(
        min(budget.p1, budget.n0 / gains.g21),
        min(budget.p2, budget.n0 / gains.g12),
    )


def baseline_rates(gains, budget):
    """Return ``(tin, orthogonal)`` sum-rates.

    Orthogonal sharing gives each user half the time at full power.
    """
    lb = link_budget(gains, budget)
    tin = math.log2(1 + lb.snr1 / (1 + lb.inr1)) + math.log2(1 + lb.snr2 / (1 + lb.inr2))
    orthogonal = 0.5 * math.log2(1 + lb.snr1) + 0.5 * math.log2(1 + lb.snr2)
    return tin, orthogonal
