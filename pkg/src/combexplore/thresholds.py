"""Stopping thresholds, exploration bonuses and the special functions behind them.

The theoretically licensed threshold needs a handful of non-elementary
functions: the (shifted) negative branch of the Lambert W function, the
sub-Gaussian deviation function ``tee``, and for the Gaussian case the pair
``g_gaussian`` / ``cgg`` built on the Riemann zeta function on (1, 2].
All functions here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ThresholdContext",
    "lambert_wbar",
    "exploration_bonus",
    "tee",
    "zeta",
    "g_gaussian",
    "cgg",
    "stopping_threshold",
    "max_symmetric_difference",
]


@dataclass(frozen=True)
class ThresholdContext:
    """Problem constants the stopping threshold depends on.

    d0 is the maximal symmetric difference between two distinct answers,
    K the maximal action size and answer_count the number of answers.
    """

    d0: int
    K: int
    answer_count: int
    mode: str = "stylized"

    def __post_init__(self):
        if self.d0 < 1:
            raise ValueError("d0 must be >= 1")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.answer_count < 2:
            raise ValueError("need at least two answers")


def max_symmetric_difference(answers) -> int:
    """Exhaustive max |I ^ J| over distinct answer pairs (2 for singleton answers)."""
    sets = [frozenset(a) for a in answers]
    best = 0
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            best = max(best, len(sets[i] ^ sets[j]))
    return best


def lambert_wbar(x: float) -> float:
    """Unique u >= 1 solving u - ln(u) = x, for x >= 1.

    Equals -W_{-1}(-e^{-x}) in terms of the negative Lambert W branch.
    Safeguarded Newton iteration; residual tolerance 1e-12.
    """
    if x < 1.0:
        raise ValueError(f"lambert_wbar requires x >= 1, got {x}")
    if x == 1.0:
        return 1.0
    u = x + math.log(x) + 0.5
    for _ in range(100):
        res = u - math.log(u) - x
        if abs(res) <= 1e-12:
            return u
        du = 1.0 - 1.0 / u
        if du <= 0.0:
            break
        u = max(1.0, u - res / du)
    # Newton degenerates when the root is close to 1 (flat derivative); bisect.
    lo, hi = 1.0, max(u, x + math.log(x) + 1.0)
    while hi - math.log(hi) < x:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - math.log(mid) < x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def exploration_bonus(t: float, mode: str = "stylized", c: float = 1.0, b: float = 1.0) -> float:
    """Exploration bonus f(t).

    stylized: max(ln t, 0).  theoretical: lambert_wbar((1+c)(1+b) ln t),
    clamped to 1 when the argument falls below the Lambert domain.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if mode == "stylized":
        return max(math.log(t), 0.0)
    if mode == "theoretical":
        arg = (1.0 + c) * (1.0 + b) * math.log(t)
        if arg < 1.0:
            return 1.0
        return lambert_wbar(arg)
    raise ValueError(f"unknown bonus mode {mode!r}")


def _htilde(z: float, x: float) -> float:
    """Piecewise map used by ``tee``; h^{-1} on [1, inf) is lambert_wbar.

    The branch switches where h^{-1}(x) reaches 1/ln(z), i.e. at x = h(1/ln z);
    there exp(1/w) w = z w, so the two branches join continuously and the map
    is strictly increasing.
    """
    w_cut = 1.0 / math.log(z)
    if x >= w_cut - math.log(w_cut):
        hinv = lambert_wbar(x)
        return math.exp(1.0 / hinv) * hinv
    return z * (x - math.log(math.log(z)))


def tee(x: float) -> float:
    """Sub-Gaussian deviation function; approximately x + 4 ln(1 + x + sqrt(2x)) for x >= 5."""
    if x < 0:
        raise ValueError("x must be >= 0")
    arg = (lambert_wbar(1.0 + x) + math.log(math.pi**2 / 3.0)) / 2.0
    return 2.0 * _htilde(1.5, arg)


def zeta(s: float, terms: int = 1000) -> float:
    """Riemann zeta on (1, 2] by partial sums with Euler-Maclaurin tail correction."""
    if not 1.0 < s <= 2.0:
        raise ValueError("zeta implemented for s in (1, 2]")
    n = terms
    total = sum(k ** (-s) for k in range(1, n + 1))
    # tail: integral term, half correction and two Bernoulli terms
    total += n ** (1.0 - s) / (s - 1.0)
    total -= 0.5 * n ** (-s)
    total += s / 12.0 * n ** (-s - 1.0)
    total -= s * (s + 1.0) * (s + 2.0) / 720.0 * n ** (-s - 3.0)
    return total


def g_gaussian(y: float) -> float:
    """Gaussian deviation exponent g_G(y) = 2y - 2y ln(4y) + ln(zeta(2y)) - ln(1-y)/2."""
    if not 0.5 < y < 1.0:
        raise ValueError("g_gaussian requires y in (1/2, 1)")
    return 2.0 * y - 2.0 * y * math.log(4.0 * y) + math.log(zeta(2.0 * y)) - 0.5 * math.log(1.0 - y)


_CGG_LO = 0.5 + 1e-6
_CGG_HI = 1.0 - 1e-9


def cgg(x: float) -> float:
    """min over y in (1/2, 1] of (g_G(y) + x) / y; approximately x + ln(x) for large x."""
    if x < 0:
        raise ValueError("x must be >= 0")

    def obj(y: float) -> float:
        return (g_gaussian(y) + x) / y

    # coarse grid to bracket the interior minimizer, then golden-section
    grid = [_CGG_LO + i * (_CGG_HI - _CGG_LO) / 400.0 for i in range(401)]
    vals = [obj(y) for y in grid]
    k = vals.index(min(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, f2 = obj(c1), obj(c2)
    while b - a > 1e-9:
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = obj(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = obj(c2)
    return min(f1, f2)


def stopping_threshold(t: float, delta: float, ctx: ThresholdContext) -> float:
    """Stopping threshold beta(t, delta) in the mode carried by ctx."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    d0 = ctx.d0
    if ctx.mode == "stylized":
        return math.log((1.0 + math.log(t)) / delta)
    ratio = math.log((ctx.answer_count - 1) / delta) / d0
    if ctx.mode == "theoretical_subgaussian":
        return 3.0 * d0 * math.log(1.0 + math.log(t * ctx.K / d0)) + d0 * tee(ratio)
    if ctx.mode == "theoretical_gaussian":
        return 2.0 * d0 * math.log(4.0 + math.log(t * ctx.K / d0)) + d0 * cgg(ratio)
    raise ValueError(f"unknown threshold mode {ctx.mode!r}")
