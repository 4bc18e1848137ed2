"""
Point Evaluation Pipeline

Turns one parameter point (GHZ parameters, splitting class, loss) into an
EntanglementReport, either through the composite-mode reduction or the
full tensor over N physical modes.

Composite, lossless: psi0(N, -r) in the rotated frame, subtraction with
cosh(s) b_A - sinh(s) b_A^dagger. Initial log-negativity does not depend
on k there; it is converged on its own cutoff ladder and memoised per
(N, r, class, cutoff), so every k reports the same value.

Composite, lossy: the physical-frame state with A and B merged, traced
down to the composites the splitting keeps, then per-composite loss and
the plain annihilator on A, split across the merged composite and its
complement.

Direct: phi0 from squeezed inputs and the splitter; subtraction acts on
physical mode 0. Lossy direct points trace out unneeded modes and run the
loss on a factored mixture.

A point is accepted once two cutoffs one step apart agree on every value
to the convergence tolerance.
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

from ..core.cache import cached
from ..core.config import get_settings
from ..core.errors import CutoffTooSmallError, NoPhotonError
from ..quantum.entanglement import enumerate_splittings, gain, log_negativity
from ..quantum.fock import FockSpace, Mixture, QuantumState, destroy
from ..quantum.ghz import (
    escalate_cutoff,
    loss_composite,
    prepare_composite,
    prepare_phi0_direct,
    subtract_composite,
    subtract_lossy,
)
from ..quantum.optics import loss_mixture, subtract_mixture, subtract_photon
from ..quantum.splittings import CanonicalSplitting
from ..schemas import EntanglementReport, GhzParams, SplittingSpec

logger = logging.getLogger(__name__)

PointValues = Tuple[float, float, float]
SplittingLike = Union[CanonicalSplitting, SplittingSpec]


def _max_change(a: Sequence[float], b: Sequence[float]) -> float:
    return max(abs(x - y) for x, y in zip(a, b))


# ============ Composite route ============
@cached(key_prefix="pipeline")
def _rotated_e_before(N: int, r: float, splitting: CanonicalSplitting, cutoff: int,
                      tail_tolerance: Optional[float]) -> Tuple[float]:
    cs = prepare_composite(GhzParams(N=N, r=r), splitting.grouping, cutoff=cutoff,
                           tail_tolerance=tail_tolerance)
    return (log_negativity(cs.state, splitting.composite_spec(cs.labels)),)


def _rotated_after(params: GhzParams, splitting: CanonicalSplitting, cutoff: int,
                   tail_tolerance: Optional[float]) -> Tuple[float, float]:
    cs = prepare_composite(params, splitting.grouping, cutoff=cutoff,
                           tail_tolerance=tail_tolerance)
    subtracted, weight = subtract_composite(cs, tail_tolerance=tail_tolerance)
    return log_negativity(subtracted.state, splitting.composite_spec(cs.labels)), weight


def _lossy_point(params: GhzParams, splitting: CanonicalSplitting, loss: float,
                 cutoff: int, tail_tolerance: Optional[float]) -> PointValues:
    cs = prepare_composite(params, splitting.grouping, cutoff=cutoff,
                           tail_tolerance=tail_tolerance)
    lossy = loss_composite(cs, loss, keep=splitting.kept_labels(),
                           tail_tolerance=tail_tolerance)
    e_before = log_negativity(lossy.main, splitting.merged_spec(lossy.labels))
    keep_partner = not splitting.a_traced
    subtracted, weight = subtract_lossy(lossy, keep_partner=keep_partner)
    spec = splitting.merged_spec(lossy.labels, partner=keep_partner and lossy.partner is not None)
    return e_before, log_negativity(subtracted, spec), weight


# ============ Direct route ============
def _localise(spec: SplittingSpec, keep: List[int]) -> SplittingSpec:
    position = {q: i for i, q in enumerate(keep)}
    return SplittingSpec(
        side_a=tuple(position[q] for q in spec.side_a),
        side_b=tuple(position[q] for q in spec.side_b),
        traced=tuple(position[q] for q in spec.traced if q in position),
        label=spec.label,
    )


def _direct_state(params: GhzParams, spec: SplittingSpec, loss: float, cutoff: int,
                  tail_tolerance: Optional[float]
                  ) -> Tuple[Union[QuantumState, Mixture], SplittingSpec]:
    state = prepare_phi0_direct(params, FockSpace(cutoff, params.N), tail_tolerance)
    if loss == 0.0:
        return state, spec
    keep = sorted(set(spec.kept) | {0})
    mixture = Mixture.from_state(state)
    if len(keep) < params.N:
        mixture = mixture.trace_out([q for q in range(params.N) if q not in keep])
        spec = _localise(spec, keep)
    return loss_mixture(mixture, loss, range(len(keep))), spec


def _subtract_direct(state: Union[QuantumState, Mixture]) -> Tuple[Union[QuantumState, Mixture], float]:
    if isinstance(state, Mixture):
        return subtract_mixture(state, destroy(state.space.cutoff), 0)
    return subtract_photon(state, 0)


def _direct_point(params: GhzParams, spec: SplittingSpec, loss: float, cutoff: int,
                  tail_tolerance: Optional[float]) -> PointValues:
    state, local_spec = _direct_state(params, spec, loss, cutoff, tail_tolerance)
    e_before = log_negativity(state, local_spec)
    subtracted, weight = _subtract_direct(state)
    return e_before, log_negativity(subtracted, local_spec), weight


# ============ Reports ============
def _build_report(params: GhzParams, spec: SplittingSpec, loss: float, values: PointValues,
                  cutoff: int, tap_reflectivity: Optional[float]) -> EntanglementReport:
    e_before, e_after, weight = values
    tap = get_settings().tap_reflectivity if tap_reflectivity is None else tap_reflectivity
    g = gain(e_after, e_before)
    if g is None:
        logger.warning(f"gain undefined for {spec.label} at N={params.N}, r={params.r}: "
                       f"initial log-negativity {e_before:.3e}")
    return EntanglementReport(
        splitting=spec,
        e_before=e_before,
        e_after=e_after,
        gain=g,
        params=params,
        loss=loss,
        success_weight=weight,
        detection_probability=tap * weight,
        cutoff=cutoff,
        status="ok" if g is not None else "undefined-gain",
    )


def evaluate_composite(
    params: GhzParams,
    splitting: CanonicalSplitting,
    loss: float = 0.0,
    cutoff: Optional[int] = None,
    cutoff_ceiling: Optional[int] = None,
    tap_reflectivity: Optional[float] = None,
    tail_tolerance: Optional[float] = None,
) -> EntanglementReport:
    """
    Evaluate one splitting class through the composite-mode reduction.

    Args:
        params: GHZ family parameters; params.N must match the class
        splitting: canonical class to evaluate
        loss: uniform loss parameter applied before subtraction
        cutoff: first cutoff tried (Settings default when None)
        cutoff_ceiling: largest cutoff tried before giving up; a point
            whose values still move between the last two cutoffs is
            reported unavailable
        tap_reflectivity: multiplier turning the success weight into a
            detection probability
        tail_tolerance: tail guard override

    Returns:
        EntanglementReport labelled with the class label, carrying the
        physical representative splitting
    """
    start = cutoff
    if loss == 0.0:
        (e_before,), before_cutoff = escalate_cutoff(
            lambda c: _rotated_e_before(params.N, params.r, splitting, c, tail_tolerance),
            start=start, ceiling=cutoff_ceiling, compare=_max_change,
        )
        (e_after, weight), after_cutoff = escalate_cutoff(
            lambda c: _rotated_after(params, splitting, c, tail_tolerance),
            start=start, ceiling=cutoff_ceiling, compare=_max_change,
        )
        values, used = (e_before, e_after, weight), max(before_cutoff, after_cutoff)
    else:
        values, used = escalate_cutoff(
            lambda c: _lossy_point(params, splitting, loss, c, tail_tolerance),
            start=start, ceiling=cutoff_ceiling, compare=_max_change,
        )
    return _build_report(params, splitting.physical_spec(), loss, values, used, tap_reflectivity)


def evaluate_direct(
    params: GhzParams,
    splitting: SplittingLike,
    loss: float = 0.0,
    cutoff: Optional[int] = None,
    cutoff_ceiling: Optional[int] = None,
    tap_reflectivity: Optional[float] = None,
    tail_tolerance: Optional[float] = None,
) -> EntanglementReport:
    """Evaluate a class or an explicit physical splitting over the full tensor space."""
    spec = splitting.physical_spec() if isinstance(splitting, CanonicalSplitting) else splitting
    ceiling = get_settings().direct_cutoff_ceiling if cutoff_ceiling is None else cutoff_ceiling
    values, used = escalate_cutoff(
        lambda c: _direct_point(params, spec, loss, c, tail_tolerance),
        start=cutoff, ceiling=ceiling, compare=_max_change,
    )
    return _build_report(params, spec, loss, values, used, tap_reflectivity)


def evaluate_point(
    params: GhzParams,
    splitting: CanonicalSplitting,
    loss: float = 0.0,
    cutoff: Optional[int] = None,
    cutoff_ceiling: Optional[int] = None,
    tap_reflectivity: Optional[float] = None,
    direct: bool = False,
) -> EntanglementReport:
    """Evaluate a point for a sweep; numerical failures become row statuses."""
    evaluate = evaluate_direct if direct else evaluate_composite
    try:
        return evaluate(params, splitting, loss=loss, cutoff=cutoff,
                        cutoff_ceiling=cutoff_ceiling, tap_reflectivity=tap_reflectivity)
    except CutoffTooSmallError as exc:
        logger.warning(f"{splitting.label} unavailable at N={params.N}, r={params.r}, "
                       f"k={params.k}, l={loss}: {exc}")
        status = "unavailable"
        used = exc.cutoff
    except NoPhotonError as exc:
        logger.warning(f"{splitting.label} has no photon to subtract: {exc}")
        status = "no-photon"
        used = None
    return EntanglementReport(splitting=splitting.physical_spec(), params=params, loss=loss,
                              cutoff=used, status=status)


def evaluate_direct_splittings(
    params: GhzParams,
    max_traced: int = 0,
    loss: float = 0.0,
    cutoff: Optional[int] = None,
    tail_tolerance: Optional[float] = None,
) -> List[EntanglementReport]:
    """
    Every labelled physical splitting of one full-tensor state.

    The state is prepared and subtracted once; all splittings are read off
    the same pair of states, which is what the partial-trace hierarchy
    compares.
    """
    settings = get_settings()

    def build(c: int) -> List[EntanglementReport]:
        state: Union[QuantumState, Mixture] = prepare_phi0_direct(
            params, FockSpace(c, params.N), tail_tolerance)
        if loss:
            state = loss_mixture(Mixture.from_state(state), loss, range(params.N))
        subtracted, weight = _subtract_direct(state)
        return [
            _build_report(params, spec, loss,
                          (log_negativity(state, spec), log_negativity(subtracted, spec), weight),
                          c, None)
            for spec in enumerate_splittings(params.N, max_traced)
        ]

    def change(a: List[EntanglementReport], b: List[EntanglementReport]) -> float:
        return max(_max_change((x.e_before, x.e_after, x.success_weight),
                               (y.e_before, y.e_after, y.success_weight)) for x, y in zip(a, b))

    reports, _ = escalate_cutoff(build, start=cutoff, ceiling=settings.direct_cutoff_ceiling,
                                 compare=change)
    return reports
