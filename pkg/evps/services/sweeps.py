"""
Sweep Drivers

One driver per sweep family. Each expands its SweepConfig into work items
(one per grid point and k value), evaluates them in-process or on a
worker pool, and gathers rows in fixed grid order:

    for grid value -> for k in the series -> for splitting

Numerical failures never abort a sweep; they surface as row statuses.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from multiprocessing import Pool
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .. import __version__
from ..core.errors import GridError, ParameterError
from ..core.logging import SweepLogger, log_call
from ..quantum.splittings import (
    CanonicalSplitting,
    default_classes,
    four_party_classes,
    parse_splitting,
)
from ..schemas import GhzParams, SweepConfig, SweepFamily, SweepResult, SweepRow
from .export import write_result
from .pipeline import evaluate_point

logger = logging.getLogger(__name__)
sweep_logger = SweepLogger(logger)

GRID_PARAMS: Dict[str, str] = {"k_sweep": "k", "n_sweep": "N", "loss_sweep": "l", "r_sweep": "r"}

# Default grids when a config leaves them to the driver.
DEFAULT_K_GRID = [round(0.02 * i, 2) for i in range(101)]
ASYMPTOTE_K = [5.0, 10.0, 50.0, 100.0]
DEFAULT_LOSS_GRID = [round(0.01 * i, 2) for i in range(96)]
DEFAULT_R_GRID = [round(0.01 * i, 2) for i in range(1, 51)]


@dataclass(frozen=True)
class WorkItem:
    """All splittings of one (grid value, k) point."""

    grid_param: str
    grid_value: float
    params: GhzParams
    splittings: Tuple[CanonicalSplitting, ...]
    loss: float
    cutoff: Optional[int]
    cutoff_ceiling: Optional[int]
    tap_reflectivity: Optional[float]
    direct: bool


def run_item(item: WorkItem) -> List[SweepRow]:
    rows = []
    for splitting in item.splittings:
        report = evaluate_point(
            item.params, splitting, loss=item.loss, cutoff=item.cutoff,
            cutoff_ceiling=item.cutoff_ceiling, tap_reflectivity=item.tap_reflectivity,
            direct=item.direct,
        )
        rows.append(SweepRow.from_report(report, item.grid_param, item.grid_value))
    return rows


def execute(items: Sequence[WorkItem], jobs: int = 1) -> List[SweepRow]:
    """Evaluate items, in parallel when jobs > 1; row order follows item order."""
    if jobs > 1 and len(items) > 1:
        with Pool(min(jobs, len(items))) as pool:
            chunks = pool.map(run_item, items)
    else:
        chunks = [run_item(item) for item in items]
    return [row for chunk in chunks for row in chunk]


def config_hash(config: SweepConfig) -> str:
    payload = json.dumps(config.echo(), sort_keys=True).encode()
    return hashlib.sha1(payload, usedforsecurity=False).hexdigest()[:10]


# ============ Splitting resolution ============
def classes_for(config: SweepConfig, N: int) -> List[CanonicalSplitting]:
    if config.splittings == "all-canonical":
        return default_classes(N, config.max_traced)
    return [parse_splitting(label, N) for label in config.splittings]


def _n_sweep_classes(config: SweepConfig, modes: Sequence[int]) -> Dict[int, List[CanonicalSplitting]]:
    if config.splittings != "all-canonical":
        return {N: classes_for(config, N) for N in modes}
    patterns = [cls.pattern for cls in four_party_classes(4)]
    usable = [p for p in patterns if all(p.fits(N) for N in modes)]
    if not usable:
        raise GridError(f"no canonical splitting fits every N in {list(modes)}", parameter="grid")
    return {N: [p.resolve(N) for p in usable] for N in modes}


def _mode_grid(grid: Sequence[float]) -> List[int]:
    modes = []
    for value in grid:
        if value != int(value) or value < 2:
            raise GridError(f"mode counts must be integers >= 2, got {value}", parameter="grid")
        modes.append(int(value))
    return modes


# ============ Work item expansion ============
def _item(config: SweepConfig, grid_value: float, params: GhzParams,
          splittings: Sequence[CanonicalSplitting], loss: float) -> WorkItem:
    return WorkItem(
        grid_param=GRID_PARAMS[config.family],
        grid_value=grid_value,
        params=params,
        splittings=tuple(splittings),
        loss=loss,
        cutoff=config.cutoff,
        cutoff_ceiling=config.cutoff_ceiling,
        tap_reflectivity=config.tap_reflectivity,
        direct=config.direct,
    )


def _k_items(config: SweepConfig) -> List[WorkItem]:
    if any(k < 0 for k in config.grid):
        raise GridError("k grid must be non-negative", parameter="grid")
    classes = classes_for(config, config.params.N)
    return [_item(config, k, config.params.with_k(k), classes, config.loss) for k in config.grid]


def _n_items(config: SweepConfig) -> List[WorkItem]:
    modes = _mode_grid(config.grid)
    classes = _n_sweep_classes(config, modes)
    return [
        _item(config, N, config.params.with_modes(N).with_k(k), classes[N], config.loss)
        for N in modes
        for k in config.series()
    ]


def _loss_items(config: SweepConfig) -> List[WorkItem]:
    if any(not 0.0 <= l <= 1.0 for l in config.grid):
        raise GridError("loss grid must lie in [0, 1]", parameter="grid")
    classes = classes_for(config, config.params.N)
    return [
        _item(config, l, config.params.with_k(k), classes, l)
        for l in config.grid
        for k in config.series()
    ]


def _r_items(config: SweepConfig) -> List[WorkItem]:
    if any(not math.isfinite(r) for r in config.grid):
        raise GridError("squeezing grid must be finite", parameter="grid")
    classes = classes_for(config, config.params.N)
    return [
        _item(config, r, config.params.with_r(r).with_k(k), classes, config.loss)
        for r in config.grid
        for k in config.series()
    ]


EXPANDERS: Dict[str, Callable[[SweepConfig], List[WorkItem]]] = {
    "k_sweep": _k_items,
    "n_sweep": _n_items,
    "loss_sweep": _loss_items,
    "r_sweep": _r_items,
}


# ============ Drivers ============
def _run(config: SweepConfig, family: SweepFamily) -> SweepResult:
    if config.family != family:
        raise ParameterError(f"expected a {family} config, got {config.family}",
                             parameter="family")
    items = EXPANDERS[family](config)
    run_id = config_hash(config)
    splittings = sorted({s.label for item in items for s in item.splittings})
    sweep_logger.log_start(run_id, family, grid_size=len(config.grid), splittings=len(splittings),
                           extra={"series": config.series(), "jobs": config.jobs,
                                  "labels": splittings})

    rows = execute(items, config.jobs)

    unavailable = sum(1 for row in rows if row.status in ("unavailable", "no-photon"))
    sweep_logger.log_finish(run_id, family, rows=len(rows), unavailable=unavailable)
    provenance = {
        "code_version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "run_id": run_id,
        "cutoffs": sorted({row.cutoff for row in rows if row.cutoff is not None}),
        "config": config.echo(),
    }
    result = SweepResult(config=config, rows=rows, provenance=provenance)
    if config.output is not None:
        write_result(result, config.output)
    return result


@log_call(logger)
def run_k_sweep(config: SweepConfig) -> SweepResult:
    """Gain against the squeezing ratio k at fixed N and r."""
    return _run(config, "k_sweep")


@log_call(logger)
def run_n_sweep(config: SweepConfig) -> SweepResult:
    """Gain against the mode count N for each k in the series."""
    return _run(config, "n_sweep")


@log_call(logger)
def run_loss_sweep(config: SweepConfig) -> SweepResult:
    """Gain against the uniform loss parameter for each k in the series."""
    return _run(config, "loss_sweep")


@log_call(logger)
def run_r_sweep(config: SweepConfig) -> SweepResult:
    """Log-negativity before and after subtraction against r for each k in the series."""
    return _run(config, "r_sweep")


DRIVERS: Dict[str, Callable[[SweepConfig], SweepResult]] = {
    "k_sweep": run_k_sweep,
    "n_sweep": run_n_sweep,
    "loss_sweep": run_loss_sweep,
    "r_sweep": run_r_sweep,
}


def run_sweep(config: SweepConfig) -> SweepResult:
    return DRIVERS[config.family](config)
