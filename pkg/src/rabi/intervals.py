"""Unit-interval occupancy of the shifted spectra and equidistribution counts.

Shifting each eigenvalue by g**2 places it near an integer; for most n the
open interval (n, n+1) then holds exactly two shifted eigenvalues of one
parity class and none of the other, with the adjacent intervals holding a
pair of the opposite class.  The exceptions cluster where cos(theta_n) is
small: an index n in a window [N/2, N] is "good" when
|cos(theta_n)| > N**(-1/4 + delta_exp) and "bad" otherwise.

The bad set is controlled by an elementary equidistribution count: for any
a > 0 and shift gamma, the fractional parts ((a*sqrt(n) + gamma)) fall into a
subinterval of [0, 1] with discrepancy O(sqrt(N)) over n in [N/2, N]
(:func:`fejer_count`).  Applied with a = 4g/pi, gamma = 1/4, the bad count
over [N/2, N] comes out near N**(3/4 + delta_exp) / pi; only the
observed/predicted ratio is reported since the constant is heuristic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .asymptotics import theta
from .eigensolver import EigenvalueRecord, SpectrumTable
from .model import ModelParams, Parity

__all__ = [
    "IntervalVerdict",
    "PatternVerdict",
    "BoundaryHit",
    "IntervalClassification",
    "FejerReport",
    "BadSetPoint",
    "shifted",
    "shifted_values",
    "is_good",
    "good_mask",
    "count_bad",
    "predicted_bad_count",
    "classify_interval",
    "classify_range",
    "check_alternation_pattern",
    "fejer_count",
    "bad_set_ladder",
    "bad_count_slope",
]

DEFAULT_BOUNDARY_EPS = 1e-6
DEFAULT_DELTA_EXP = 0.05

# Boundary tolerance must dominate eigenvalue error, or near-integer shifted
# eigenvalues would be classified on numerical noise.
_EPS_OVER_EIGEN_TOL = 100.0


class IntervalVerdict(enum.Enum):
    MINUS_PAIR = "minus_pair"
    PLUS_PAIR = "plus_pair"
    VIOLATION = "violation"
    BOUNDARY = "boundary"
    UNCLASSIFIED = "unclassified"

    @property
    def label(self) -> str:
        return self.value


class PatternVerdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    UNCLASSIFIED = "unclassified"

    @property
    def label(self) -> str:
        return self.value


class BoundaryHit(NamedTuple):
    label: int
    parity: Parity
    distance: float


@dataclass(frozen=True)
class IntervalClassification:
    """Occupancy of (n, n+1) by shifted eigenvalues of both parities.

    ``count_plus`` and ``count_minus`` count eigenvalues confidently interior
    to the interval; anything within ``eps`` of an endpoint lands in
    ``boundary_hits`` instead (never in both), so interval members and
    boundary hits partition the covered spectrum.  ``members`` lists the
    interior (label, parity) pairs in increasing shifted order.
    """

    n: int
    count_plus: int
    count_minus: int
    boundary_hits: tuple
    good: bool
    verdict: IntervalVerdict
    members: tuple = ()


@dataclass(frozen=True)
class FejerReport:
    """Observed vs expected count of fractional parts in a subinterval."""

    a: float
    gamma: float
    alpha: float
    beta: float
    n_cap: int
    count: int
    expected: float
    discrepancy: float


@dataclass(frozen=True)
class BadSetPoint:
    """Bad-index count over [N/2, N] against the heuristic prediction."""

    n_cap: int
    count: int
    predicted: float
    ratio: float


def shifted(record: EigenvalueRecord, params: ModelParams) -> float:
    """Shifted eigenvalue E + g**2, the quantity that clusters near integers."""
    return record.value + params.g**2


def shifted_values(table: SpectrumTable, parity: Parity) -> np.ndarray:
    return table.values(parity) + table.params.g**2


def _good_threshold(n_cap: int, delta_exp: float) -> float:
    if n_cap < 2:
        raise ValueError(f"window cap must be >= 2, got {n_cap}")
    if not (0.0 < delta_exp < 0.25):
        raise ValueError(f"delta_exp must lie in (0, 1/4), got {delta_exp}")
    return float(n_cap) ** (-0.25 + delta_exp)


def is_good(n: int, n_cap: int, delta_exp: float, g: float) -> bool:
    """True when |cos(theta_n)| clears the window threshold N**(-1/4+delta_exp)."""
    threshold = _good_threshold(n_cap, delta_exp)
    return bool(abs(math.cos(float(theta(n, g)))) > threshold)


def good_mask(ns: np.ndarray, n_cap: int, delta_exp: float, g: float) -> np.ndarray:
    """Vectorized :func:`is_good` over an array of indices."""
    threshold = _good_threshold(n_cap, delta_exp)
    return np.abs(np.cos(theta(np.asarray(ns, dtype=np.float64), g))) > threshold


def count_bad(n_cap: int, delta_exp: float, g: float) -> int:
    """Number of bad n in [n_cap/2, n_cap] by direct enumeration."""
    threshold = _good_threshold(n_cap, delta_exp)
    ns = np.arange((n_cap + 1) // 2, n_cap + 1, dtype=np.float64)
    return int(np.sum(np.abs(np.cos(theta(ns, g))) <= threshold))


def predicted_bad_count(n_cap: int, delta_exp: float) -> float:
    """Heuristic bad count: interval length (2/pi)*N**(-1/4+d) times N/2 indices."""
    return float(n_cap) ** (0.75 + delta_exp) / math.pi


def bad_set_ladder(
    n_caps: Sequence[int], delta_exp: float, g: float
) -> list[BadSetPoint]:
    points = []
    for n_cap in n_caps:
        count = count_bad(n_cap, delta_exp, g)
        predicted = predicted_bad_count(n_cap, delta_exp)
        points.append(
            BadSetPoint(
                n_cap=int(n_cap),
                count=count,
                predicted=predicted,
                ratio=count / predicted,
            )
        )
    return points


def bad_count_slope(points: Sequence[BadSetPoint]) -> float:
    """Log-log slope of bad count against N over a ladder of window caps."""
    if len(points) < 2:
        raise ValueError("need at least two ladder points to fit a slope")
    n = np.array([p.n_cap for p in points], dtype=np.float64)
    c = np.array([max(p.count, 1) for p in points], dtype=np.float64)
    slope, _ = np.polyfit(np.log(n), np.log(c), 1)
    return float(slope)


def _classify_one(
    n: int,
    xs: dict,
    labels: dict,
    eps: float,
    good: bool,
) -> IntervalClassification:
    counts = {Parity.PLUS: 0, Parity.MINUS: 0}
    hits = []
    members = []
    for parity in (Parity.PLUS, Parity.MINUS):
        x = xs[parity]
        lab = labels[parity]
        lo = np.searchsorted(x, n - eps, side="left")
        hi = np.searchsorted(x, n + 1 + eps, side="right")
        for idx in range(lo, hi):
            xv = float(x[idx])
            d_left = abs(xv - n)
            d_right = abs(xv - (n + 1))
            if d_left <= eps or d_right <= eps:
                hits.append(
                    BoundaryHit(
                        label=int(lab[idx]), parity=parity, distance=min(d_left, d_right)
                    )
                )
            elif n < xv < n + 1:
                counts[parity] += 1
                members.append((xv, int(lab[idx]), parity))
    members.sort(key=lambda item: item[0])
    if hits:
        verdict = IntervalVerdict.BOUNDARY
    elif (counts[Parity.MINUS], counts[Parity.PLUS]) == (2, 0):
        verdict = IntervalVerdict.MINUS_PAIR
    elif (counts[Parity.MINUS], counts[Parity.PLUS]) == (0, 2):
        verdict = IntervalVerdict.PLUS_PAIR
    else:
        verdict = IntervalVerdict.VIOLATION
    return IntervalClassification(
        n=n,
        count_plus=counts[Parity.PLUS],
        count_minus=counts[Parity.MINUS],
        boundary_hits=tuple(hits),
        good=good,
        verdict=verdict,
        members=tuple((label, parity) for _, label, parity in members),
    )


def _validate_classify_args(table: SpectrumTable, eps: float) -> None:
    if not (eps > 0.0):
        raise ValueError(f"boundary tolerance must be positive, got {eps}")
    if eps < _EPS_OVER_EIGEN_TOL * table.eigen_tol:
        raise ValueError(
            f"boundary tolerance {eps:g} must exceed the eigenvalue tolerance "
            f"{table.eigen_tol:g} by at least {_EPS_OVER_EIGEN_TOL:g}x"
        )


def classify_interval(
    n: int,
    table: SpectrumTable,
    eps: float = DEFAULT_BOUNDARY_EPS,
    n_cap: int | None = None,
    delta_exp: float = DEFAULT_DELTA_EXP,
) -> IntervalClassification:
    """Occupancy and verdict for the interval (n, n+1).

    The table must cover labels through n + 3 so neighbors cannot leak into
    the interval unnoticed; the good flag is evaluated against ``n_cap``
    (defaulting to the table's max label).
    """
    _validate_classify_args(table, eps)
    if not (1 <= n <= table.max_label - 3):
        raise ValueError(
            f"interval index {n} outside covered label range [1, {table.max_label - 3}]"
        )
    cap = table.max_label if n_cap is None else n_cap
    xs = {p: shifted_values(table, p) for p in Parity}
    labels = {p: table.labels(p) for p in Parity}
    good = is_good(n, cap, delta_exp, table.params.g)
    return _classify_one(n, xs, labels, eps, good)


def classify_range(
    table: SpectrumTable,
    first: int,
    last: int,
    eps: float = DEFAULT_BOUNDARY_EPS,
    n_cap: int | None = None,
    delta_exp: float = DEFAULT_DELTA_EXP,
) -> list[IntervalClassification]:
    """Classifications for all intervals (n, n+1), first <= n <= last."""
    _validate_classify_args(table, eps)
    if not (1 <= first <= last <= table.max_label - 3):
        raise ValueError(
            f"interval range [{first}, {last}] outside covered label range "
            f"[1, {table.max_label - 3}]"
        )
    cap = table.max_label if n_cap is None else n_cap
    xs = {p: shifted_values(table, p) for p in Parity}
    labels = {p: table.labels(p) for p in Parity}
    ns = np.arange(first, last + 1)
    goods = good_mask(ns, cap, delta_exp, table.params.g)
    return [
        _classify_one(int(n), xs, labels, eps, bool(g)) for n, g in zip(ns, goods)
    ]


def check_alternation_pattern(
    n: int, window: Sequence[IntervalClassification]
) -> PatternVerdict:
    """Alternating-pair check on the three intervals centered at (n, n+1).

    PASS means the center interval is a pair of one parity and both neighbors
    are pairs of the other parity.  Bad center indices and windows touched by
    boundary hits are UNCLASSIFIED rather than judged.  Only the center index
    is required to be good; the neighbors inherit their sign control from it.
    """
    if len(window) != 3 or [w.n for w in window] != [n - 1, n, n + 1]:
        raise ValueError(f"window must classify intervals {n - 1}, {n}, {n + 1}")
    left, center, right = window
    if any(w.verdict is IntervalVerdict.BOUNDARY for w in window) or not center.good:
        return PatternVerdict.UNCLASSIFIED
    pairs = {
        IntervalVerdict.MINUS_PAIR: IntervalVerdict.PLUS_PAIR,
        IntervalVerdict.PLUS_PAIR: IntervalVerdict.MINUS_PAIR,
    }
    opposite = pairs.get(center.verdict)
    if opposite is not None and left.verdict is opposite and right.verdict is opposite:
        return PatternVerdict.PASS
    return PatternVerdict.FAIL


def fejer_count(a: float, gamma: float, alpha: float, beta: float, n_cap: int) -> FejerReport:
    """Exact count of n in [N/2, N] with ((a*sqrt(n) + gamma)) in [alpha, beta].

    The expected value is (beta - alpha) * N/2; the discrepancy against it is
    O(sqrt(N)) for any a > 0 and shift gamma.  A degenerate interval
    (alpha == beta) counts exact fractional-part hits only.
    """
    if not (a > 0.0):
        raise ValueError(f"a must be positive, got {a}")
    if not (0.0 <= alpha <= beta <= 1.0):
        raise ValueError(f"need 0 <= alpha <= beta <= 1, got [{alpha}, {beta}]")
    if n_cap < 2:
        raise ValueError(f"n_cap must be >= 2, got {n_cap}")
    ns = np.arange((n_cap + 1) // 2, n_cap + 1, dtype=np.float64)
    x = a * np.sqrt(ns) + gamma
    frac = x - np.floor(x)
    count = int(np.sum((frac >= alpha) & (frac <= beta)))
    expected = (beta - alpha) * n_cap / 2.0
    return FejerReport(
        a=a,
        gamma=gamma,
        alpha=alpha,
        beta=beta,
        n_cap=int(n_cap),
        count=count,
        expected=expected,
        discrepancy=abs(count - expected),
    )
