"""
Validation Suite

Oracle comparisons behind the `validate` subcommand:

- composite reduction against the full tensor pipeline, every class of
  N = 2, 3, 4, k in {0, 0.5, 1}, lossless and lossy
- every initial log-negativity against the Gaussian covariance oracle
- the two-mode Bell limit and the weak-squeezing law
- the two-mode squeezed vacuum against its symplectic value
"""

import logging
from typing import Iterable, List, Sequence

from ..core.errors import EvpsError
from ..quantum.entanglement import log_negativity
from ..quantum.fock import FockSpace, QuantumState
from ..quantum.gaussian import ghz_log_negativity, gaussian_log_negativity, tmsv_covariance
from ..quantum.ghz import weak_squeezing_log_negativity
from ..quantum.optics import squeeze_two
from ..quantum.splittings import CanonicalSplitting, canonical_classes
from ..schemas import GhzParams, SplittingSpec, ValidationCase
from .pipeline import evaluate_composite, evaluate_direct

logger = logging.getLogger(__name__)

ORACLE_R = 0.2
ORACLE_K = (0.0, 0.5, 1.0)
ORACLE_LOSS = (0.0, 0.2)
WEAK_CASES = ((2, 1, 1), (4, 2, 2), (4, 1, 3), (8, 4, 4))


def _failed(name: str, expected: float, tolerance: float, exc: Exception) -> ValidationCase:
    logger.error(f"{name}: {exc}")
    return ValidationCase(name=name, expected=expected, tolerance=tolerance, detail=str(exc))


def composite_direct_cases(modes: Sequence[int] = (2, 3, 4), full: bool = False,
                           tolerance: float = 1e-6) -> List[ValidationCase]:
    """Composite against direct, before and after subtraction."""
    cases: List[ValidationCase] = []
    for N in modes:
        for splitting in canonical_classes(N, N - 2):
            for k in ORACLE_K:
                for loss in ORACLE_LOSS:
                    if loss and N >= 4 and not full:
                        continue
                    params = GhzParams(N=N, r=ORACLE_R, k=k)
                    name = f"composite-vs-direct N={N} {splitting.label} k={k} l={loss}"
                    try:
                        composite = evaluate_composite(params, splitting, loss=loss)
                        direct = evaluate_direct(params, splitting, loss=loss)
                    except EvpsError as exc:
                        cases.append(_failed(name, 0.0, tolerance, exc))
                        continue
                    for quantity in ("e_before", "e_after"):
                        cases.append(ValidationCase(
                            name=f"{name} {quantity}",
                            expected=getattr(direct, quantity),
                            observed=getattr(composite, quantity),
                            tolerance=tolerance,
                        ))
    return cases


def gaussian_cases(modes: Iterable[int] = (2, 3, 4), tolerance: float = 1e-6) -> List[ValidationCase]:
    """Initial composite log-negativity against the covariance oracle."""
    cases: List[ValidationCase] = []
    for N in modes:
        for splitting in canonical_classes(N, min(N - 2, 2)):
            for k in ORACLE_K:
                for loss in ORACLE_LOSS:
                    params = GhzParams(N=N, r=ORACLE_R, k=k)
                    spec = splitting.physical_spec()
                    expected = ghz_log_negativity(params, spec, loss)
                    name = f"gaussian N={N} {splitting.label} k={k} l={loss}"
                    try:
                        observed = evaluate_composite(params, splitting, loss=loss).e_before
                    except EvpsError as exc:
                        cases.append(_failed(name, expected, tolerance, exc))
                        continue
                    cases.append(ValidationCase(name=name, expected=expected, observed=observed,
                                                tolerance=tolerance))
    return cases


def limit_cases() -> List[ValidationCase]:
    """Bell limit, weak-squeezing law and the TMSV value."""
    cases: List[ValidationCase] = []
    bell = evaluate_composite(GhzParams(N=2, r=1e-3), CanonicalSplitting(n=0, m=1))
    cases.append(ValidationCase(name="bell limit N=2 r=1e-3", expected=1.0,
                                observed=bell.e_after, tolerance=1e-3))

    for N, n_side, m_side in WEAK_CASES:
        splitting = CanonicalSplitting(n=n_side - 1, m=m_side, p=N - n_side - m_side)
        report = evaluate_composite(GhzParams(N=N, r=1e-3), splitting)
        cases.append(ValidationCase(
            name=f"weak squeezing N={N} n={n_side} m={m_side}",
            expected=weak_squeezing_log_negativity(N, n_side, m_side),
            observed=report.e_after,
            tolerance=1e-3,
        ))

    space = FockSpace(14, 2)
    tmsv = squeeze_two(ORACLE_R, 0, 1, space).apply(QuantumState.vacuum(space))
    spec = SplittingSpec(side_a=(0,), side_b=(1,), label="1-2")
    cases.append(ValidationCase(
        name="tmsv r=0.2",
        expected=gaussian_log_negativity(tmsv_covariance(ORACLE_R), spec),
        observed=log_negativity(tmsv, spec),
        tolerance=1e-4,
    ))
    return cases


def run_validation(full: bool = False) -> List[ValidationCase]:
    cases = limit_cases() + gaussian_cases() + composite_direct_cases(full=full)
    failed = [case for case in cases if not case.passed]
    if failed:
        logger.warning(f"validation: {len(failed)} of {len(cases)} cases failed")
    else:
        logger.info(f"validation: all {len(cases)} cases passed")
    return cases
