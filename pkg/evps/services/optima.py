"""
Optimum Location

Grid-search post-processing of sweep results: per-splitting maxima,
the k region where every splitting beats the single-source gain, local
minima, and zero crossings of the gain against loss.
"""

import logging
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from ..core.errors import ParameterError
from ..schemas import LossThreshold, OptimumReport, SweepResult, SweepRow

logger = logging.getLogger(__name__)

ALL_SPLITTINGS = "all-splittings"
Criterion = Literal["max-gain", "all-splittings-beat-k0"]


def _gain_curve(rows: Sequence[SweepRow]) -> List[Tuple[float, float]]:
    return sorted((row.grid_value, row.gain) for row in rows
                  if row.status == "ok" and row.gain is not None)


def _require_family(result: SweepResult, family: str) -> None:
    if result.config.family != family:
        raise ParameterError(f"expected a {family} result, got {result.config.family}",
                             parameter="result")


def _longest_run(grid: Sequence[float], winners: Sequence[bool]) -> Optional[Tuple[float, float]]:
    best: Optional[Tuple[float, float]] = None
    best_len = 0
    start = None
    for i, won in enumerate(list(winners) + [False]):
        if won and start is None:
            start = i
        elif not won and start is not None:
            if i - start > best_len:
                best_len = i - start
                best = (grid[start], grid[i - 1])
            start = None
    return best


def locate_optima(result: SweepResult, criterion: Criterion = "max-gain") -> OptimumReport:
    """
    Post-process a k sweep.

    "max-gain" gives the argmax of the gain per splitting. The second
    criterion finds the k grid points where every splitting's gain exceeds
    its own k = 0 gain and reports the longest contiguous run as the
    interval; no such point gives an empty report.
    """
    _require_family(result, "k_sweep")
    splittings = result.splittings()

    if criterion == "max-gain":
        argmax: Dict[str, Optional[float]] = {}
        max_gain: Dict[str, Optional[float]] = {}
        for label in splittings:
            curve = _gain_curve(result.select(splitting=label))
            if not curve:
                argmax[label], max_gain[label] = None, None
                continue
            k, g = max(curve, key=lambda point: point[1])
            argmax[label], max_gain[label] = k, g
        winning = sorted({k for k in argmax.values() if k is not None})
        return OptimumReport(criterion=criterion, argmax=argmax, max_gain=max_gain,
                             winning_k=winning)

    if criterion != "all-splittings-beat-k0":
        raise ParameterError(f"unknown criterion {criterion}", parameter="criterion")

    curves = {label: dict(_gain_curve(result.select(splitting=label))) for label in splittings}
    baseline: Dict[str, float] = {}
    for label, curve in curves.items():
        if 0.0 not in curve:
            raise ParameterError(f"k grid lacks a usable k = 0 point for {label}",
                                 parameter="grid")
        baseline[label] = curve[0.0]

    grid = [k for k in result.config.grid if k > 0.0]
    winners = [
        all(k in curve and curve[k] > baseline[label] for label, curve in curves.items())
        for k in grid
    ]
    interval = _longest_run(grid, winners)
    if interval is None:
        logger.info("no k beats the single-source gain in every splitting")
    return OptimumReport(
        criterion=criterion,
        max_gain={label: baseline[label] for label in splittings},
        winning_k=[k for k, won in zip(grid, winners) if won],
        interval=interval,
    )


def local_minima(result: SweepResult, splitting: str) -> List[float]:
    """Interior grid points whose gain is below both neighbours."""
    curve = _gain_curve(result.select(splitting=splitting))
    return [
        curve[i][0] for i in range(1, len(curve) - 1)
        if curve[i][1] < curve[i - 1][1] and curve[i][1] < curve[i + 1][1]
    ]


def crossover(result: SweepResult, splitting: str, rising: bool = True) -> Optional[float]:
    """
    k at which the gain first crosses its k = 0 value.

    With `rising` the crossing from below to above is reported, otherwise
    the crossing from above to below. Linear interpolation between grid
    points; a curve already on the far side at its first k > 0 point
    crosses at k = 0.
    """
    _require_family(result, "k_sweep")
    curve = _gain_curve(result.select(splitting=splitting))
    if not curve or curve[0][0] != 0.0:
        return None
    base = curve[0][1]
    diffs = [(k, g - base) for k, g in curve]
    for (k0, d0), (k1, d1) in zip(diffs, diffs[1:]):
        crossed = (d0 <= 0.0 < d1) if rising else (d0 >= 0.0 > d1)
        if crossed:
            return k0 + (k1 - k0) * (-d0) / (d1 - d0)
    return None


def _zero_crossing(curve: Sequence[Tuple[float, float]]) -> Optional[float]:
    """First zero of the gain; a curve that starts at or below zero gives its first grid value."""
    if curve and curve[0][1] <= 0.0:
        return curve[0][0]
    for (x0, g0), (x1, g1) in zip(curve, curve[1:]):
        if g0 > 0.0 >= g1:
            return x0 + (x1 - x0) * g0 / (g0 - g1)
    return None


def loss_thresholds(result: SweepResult) -> List[LossThreshold]:
    """
    First loss value where each splitting's gain drops to zero.

    One entry per (k, splitting) plus an "all-splittings" entry per k: the
    smallest threshold, i.e. the largest loss at which every splitting
    still gains. Curves that stay positive report None; curves that start
    at or below zero report their first loss value.
    """
    _require_family(result, "loss_sweep")
    thresholds: List[LossThreshold] = []
    for k in result.series():
        found: List[Optional[float]] = []
        for label in result.splittings():
            value = _zero_crossing(_gain_curve(result.select(splitting=label, k=k)))
            found.append(value)
            thresholds.append(LossThreshold(k=k, splitting=label, threshold=value))
        crossings = [v for v in found if v is not None]
        overall = min(crossings) if crossings else None
        thresholds.append(LossThreshold(k=k, splitting=ALL_SPLITTINGS, threshold=overall))
    return thresholds
