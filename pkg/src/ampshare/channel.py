"""Two-user Gaussian interference channel with Han-Kobayashi layering.

Notation follows the usual convention: ``gij`` is the squared channel
magnitude from transmitter ``j`` to receiver ``i``.  Powers and noise are
linear milliwatts; every rate is in bits per channel use (log base 2).

Each user splits its power into a private layer (decoded only by its own
receiver) and a common layer (decoded by both receivers).  For a fixed split
the achievable sum-rate is the two private rates plus the largest common
sum-rate inside the intersection of the two receivers' MAC regions.
"""

import enum
import math
from dataclasses import dataclass

__all__ = [
    "InvalidInputError",
    "ChannelGains",
    "PowerBudget",
    "LinkBudget",
    "PowerSplit",
    "CommonRateBounds",
    "InterferenceMode",
    "link_budget",
    "very_weak_gamma",
    "classify_mode",
    "mode_conditions_hold",
    "private_rates",
    "common_rate_bounds",
    "max_common_sum",
    "split_sum_rate",
    "normalized_sum_rate",
]


class InvalidInputError(ValueError):
    """Raised when gains, powers or splits violate their domain."""


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise InvalidInputError(f"{name} must be positive and finite, got {value!r}")


def _check_nonnegative(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise InvalidInputError(f"{name} must be non-negative and finite, got {value!r}")


@dataclass(frozen=True)
class ChannelGains:
    """Squared link magnitudes; ``g12`` is the gain from Tx2 to Rx1."""

    g11: float
    g12: float
    g21: float
    g22: float

    def __post_init__(self):
        for name in ("g11", "g12", "g21", "g22"):
            _check_positive(name, getattr(self, name))


@dataclass(frozen=True)
class PowerBudget:
    p1: float
    p2: float
    n0: float

    def __post_init__(self):
        for name in ("p1", "p2", "n0"):
            _check_positive(name, getattr(self, name))


@dataclass(frozen=True)
class LinkBudget:
    """Receiver-side SNR/INR quadruple, linear scale.

    ``inr1`` is the interference-to-noise ratio of user 2 at receiver 1.
    """

    snr1: float
    snr2: float
    inr1: float
    inr2: float

    def __post_init__(self):
        for name in ("snr1", "snr2", "inr1", "inr2"):
            _check_nonnegative(name, getattr(self, name))


@dataclass(frozen=True)
class PowerSplit:
    """Private-layer powers; the common layers get the remainder."""

    p1p: float
    p2p: float

    def check(self, budget):
        if not (0.0 <= self.p1p <= budget.p1 and 0.0 <= self.p2p <= budget.p2):
            raise InvalidInputError(
                f"split ({self.p1p}, {self.p2p}) outside budget ({budget.p1}, {budget.p2})"
            )


@dataclass(frozen=True)
class CommonRateBounds:
    """MAC bounds on the common rates: ``a*``/``s1`` at Rx1, ``b*``/``s2`` at Rx2."""

    a1: float
    a2: float
    s1: float
    b1: float
    b2: float
    s2: float


class InterferenceMode(enum.Enum):
    VERY_STRONG = "verystrong"
    STRONG = "strong"
    MIXED1 = "mixed1"
    MIXED2 = "mixed2"
    WEAK = "weak"
    VERY_WEAK = "veryweak"

    @property
    def code(self):
        return _MODE_ORDER.index(self)

    @classmethod
    def from_code(cls, code):
        return _MODE_ORDER[code]


_MODE_ORDER = tuple(InterferenceMode)


def link_budget(gains, budget):
    g, b = gains, budget
    return LinkBudget(
        snr1=g.g11 * b.p1 / b.n0,
        snr2=g.g22 * b.p2 / b.n0,
        inr1=g.g12 * b.p2 / b.n0,
        inr2=g.g21 * b.p1 / b.n0,
    )


def very_weak_gamma(lb):
    """Return the very-weak test statistic, or None when its denominator vanishes."""
    s1, s2, i1, i2 = lb.snr1, lb.snr2, lb.inr1, lb.inr2
    den = (i1 - s2) * (i2 - s1)
    if den == 0.0:
        return None
    return i1 * i2 * (s1 * s2 - i1 * i2 + s1 - i2 + s2 - i1) / den


def classify_mode(lb):
    """Map a link budget to its interference regime.

    Rows are tested in table order and the first match wins, so budgets that
    satisfy the very-strong conditions are never reported as strong.
    """
    s1, s2, i1, i2 = lb.snr1, lb.snr2, lb.inr1, lb.inr2
    if s1 < i2 / (1.0 + s2) and s2 < i1 / (1.0 + s1):
        return InterferenceMode.VERY_STRONG
    if s1 < i2 and s2 < i1:
        return InterferenceMode.STRONG
    if s1 >= i2 and s2 < i1:
        return InterferenceMode.MIXED1
    if s1 < i2 and s2 >= i1:
        return InterferenceMode.MIXED2
    gamma = very_weak_gamma(lb)
    # zero denominator sits on the weak/very-weak boundary
    if gamma is not None and gamma < 1.0:
        return InterferenceMode.VERY_WEAK
    return InterferenceMode.WEAK


def mode_conditions_hold(lb, mode):
    """Re-check the defining inequalities of ``mode`` on ``lb``."""
    s1, s2, i1, i2 = lb.snr1, lb.snr2, lb.inr1, lb.inr2
    if mode is InterferenceMode.VERY_STRONG:
        return s1 < i2 / (1.0 + s2) and s2 < i1 / (1.0 + s1)
    if mode is InterferenceMode.STRONG:
        return s1 < i2 and s2 < i1
    if mode is InterferenceMode.MIXED1:
        return s1 >= i2 and s2 < i1
    if mode is InterferenceMode.MIXED2:
        return s1 < i2 and s2 >= i1
    weak_quadrant = s1 >= i2 and s2 >= i1
    gamma = very_weak_gamma(lb)
    if mode is InterferenceMode.VERY_WEAK:
        return weak_quadrant and gamma is not None and gamma < 1.0
    return weak_quadrant and (gamma is None or gamma >= 1.0)


def private_rates(gains, budget, split):
    split.check(budget)
    g, n0 = gains, budget.n0
    r1p = math.log2(1.0 + g.g11 * split.p1p / (g.g12 * split.p2p + n0))
    r2p = math.log2(1.0 + g.g22 * split.p2p / (g.g21 * split.p1p + n0))
    return r1p, r2p


def common_rate_bounds(gains, budget, split):
    split.check(budget)
    g, n0 = gains, budget.n0
    c1 = budget.p1 - split.p1p
    c2 = budget.p2 - split.p2p
    # private layers are background noise at both receivers
    d1 = g.g11 * split.p1p + g.g12 * split.p2p + n0
    d2 = g.g21 * split.p1p + g.g22 * split.p2p + n0
    return CommonRateBounds(
        a1=math.log2(1.0 + g.g11 * c1 / d1),
        a2=math.log2(1.0 + g.g12 * c2 / d1),
        s1=math.log2(1.0 + (g.g11 * c1 + g.g12 * c2) / d1),
        b1=math.log2(1.0 + g.g21 * c1 / d2),
        b2=math.log2(1.0 + g.g22 * c2 / d2),
        s2=math.log2(1.0 + (g.g21 * c1 + g.g22 * c2) / d2),
    )


def max_common_sum(bounds):
    """Largest R1c + R2c inside both MAC regions."""
    b = bounds
    return min(b.s1, b.s2, b.a1 + b.b2, b.b1 + b.a2)


def split_sum_rate(gains, budget, split):
    """Achievable H-K sum-rate of a power split.

    This is the one objective shared by the optimizer, the grid oracle and
    the baselines.
    """
    r1p, r2p = private_rates(gains, budget, split)
    return r1p + r2p + max_common_sum(common_rate_bounds(gains, budget, split))


def normalized_sum_rate(lb, x, y):
    """Sum-rate with private power fractions ``x``, ``y`` in [0, 1].

    Uses the factored form: every min term of the objective shares the
    denominator ``(1 + inr1*y)(1 + inr2*x)``, so the sum-rate is
    ``log2(min_k N_k) - log2(u) - log2(v)`` with each ``N_k`` a product of
    two affine functions of the fractions.
    """
    s1, s2, i1, i2 = lb.snr1, lb.snr2, lb.inr1, lb.inr2
    t1 = 1.0 + s1 + i1
    t2 = 1.0 + i2 + s2
    n_s1 = t1 * (1.0 + i2 * x + s2 * y)
    n_s2 = t2 * (1.0 + s1 * x + i1 * y)
    n_a1b2 = (1.0 + s1 + i1 * y) * (1.0 + i2 * x + s2)
    n_b1a2 = (1.0 + i2 + s2 * y) * (1.0 + s1 * x + i1)
    return (
        math.log2(min(n_s1, n_s2, n_a1b2, n_b1a2))
        - math.log2(1.0 + i1 * y)
        - math.log2(1.0 + i2 * x)
    )
