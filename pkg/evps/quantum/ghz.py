"""
GHZ State Family Module

Preparation of psi0(N, zeta) = U(N) S_1(zeta)|vac> and of the multi-source
family phi0(N, r1, r2) = U(N) S_1(-r1) S_2(r2) ... S_N(r2)|vac>, both as
full tensors over N physical modes (small N) and in the composite-mode
reduction that scales to any N.

Input squeezers act on vacuum, so their output is written in closed form
and truncation only cuts a known tail; the passive splitter that follows
is exact on every block of fewer than `cutoff` photons.

Composite frame. phi0(N, r/(k+1), kr/(k+1)) equals prod_l S_l(kr/(k+1))
applied to psi0(N, -r). Entanglement is blind to the local squeezers, so
lossless composite computations work with psi0(N, -r) and conjugate the
subtraction instead:

    b_A -> cosh(s) b_A - sinh(s) b_A^dagger,   s = kr/(k+1).

This is the "rotated" frame. Loss does not commute with the local
squeezers, so lossy computations rebuild the physical-frame state. Equal
squeezers commute with the real coupler chain, so that state is the chain
applied to S(s - r)|0> on the source composite and S(s)|0> elsewhere.

Composite modes. b_X = (sum of the b_j in group X)/sqrt(|X|). In terms of
these, psi0(N, -r) = exp(-r/2 (sum_X sqrt(|X|/N) b_X)^2 - h.c.)|vac>, and
the orthogonal complements inside each group stay in vacuum. A uniform
passive rotation inside a group is local to whichever side of a splitting
holds that group, so partial traces and transposes over composites give
the same values as over the physical modes. Identical local squeezers and
uniform loss on every mode of a group factor the same way. This is what
lets a handful of composite modes stand in for N physical modes.

Lossy recombination. In the physical frame the complements are squeezed
by S(s) rather than empty. A and B always sit on the same side, so they are
merged into one composite of 1 + n modes; the subtracted mode then splits
as b_A = b_AB/sqrt(1+n) + sqrt(n/(1+n)) b_perp, where b_perp is a single
complement mode uncorrelated with the rest before and after uniform loss.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..core.cache import cached
from ..core.config import get_settings
from ..core.errors import CutoffTooSmallError, InvalidPartitionError, ParameterError, ShapeError
from ..schemas import CompositeGrouping, GhzParams
from .fock import (
    Circuit,
    FockSpace,
    Mixture,
    QuantumState,
    check_tail,
    create,
    destroy,
    partial_trace,
)
from .optics import (
    ZetaLike,
    apply_subtraction,
    coupler_chain,
    herald_mixture,
    loss_mixture,
    squeeze_single,
    squeezed_product,
    subtract_mixture,
    symmetric_splitter,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")


# ============ Cutoff policy ============
def escalate_cutoff(
    build: Callable[[int], T],
    start: Optional[int] = None,
    ceiling: Optional[int] = None,
    step: Optional[int] = None,
    compare: Optional[Callable[[T, T], float]] = None,
    tolerance: Optional[float] = None,
) -> Tuple[T, int]:
    """
    Call build(cutoff) from `start` upwards until it passes the tail guard.

    With `compare`, passing is not enough: the cutoff keeps rising until
    compare(result at c - step, result at c) is within `tolerance`, and the
    result at the larger cutoff is returned. Raises CutoffTooSmallError once
    the ceiling is exceeded.

    Returns:
        (result, cutoff used)
    """
    settings = get_settings()
    cutoff = settings.default_cutoff if start is None else start
    ceiling = settings.cutoff_ceiling if ceiling is None else ceiling
    step = settings.cutoff_step if step is None else step
    tolerance = settings.convergence_tolerance if tolerance is None else tolerance

    previous: Optional[T] = None
    failure: Optional[CutoffTooSmallError] = None
    discrepancy = math.inf
    while cutoff <= ceiling:
        try:
            result = build(cutoff)
        except CutoffTooSmallError as exc:
            failure, previous = exc, None
            logger.info(f"tail guard failed at cutoff {cutoff}: {exc}")
        else:
            if compare is None:
                return result, cutoff
            if previous is not None:
                discrepancy = compare(previous, result)
                if discrepancy <= tolerance:
                    return result, cutoff
                logger.info(f"cutoffs {cutoff - step} and {cutoff} disagree by {discrepancy:.2e}")
            previous = result
        cutoff += step

    if previous is None and failure is not None:
        logger.error(f"cutoff ceiling {ceiling} reached: {failure}")
        raise failure
    last = cutoff - step
    logger.error(f"cutoff ceiling {ceiling} reached without convergence "
                 f"(discrepancy {discrepancy:.2e} at cutoff {last})")
    raise CutoffTooSmallError(
        f"results at cutoffs up to {last} still change by {discrepancy:.2e} "
        f"(tolerance {tolerance:.1e})",
        cutoff=last,
        tail=discrepancy,
    )


# ============ Direct construction ============
def _direct_guard(N: int, space: FockSpace) -> None:
    limit = get_settings().direct_max_modes
    if N < 1:
        raise ParameterError(f"mode count must be positive, got {N}", parameter="N")
    if N > limit:
        raise ParameterError(f"direct construction limited to {limit} modes, got {N}",
                             parameter="N")
    if space.num_modes < N:
        raise ShapeError(f"space has {space.num_modes} modes, need {N}", parameter="space")


def prepare_psi0_direct(N: int, zeta: ZetaLike, space: FockSpace,
                        tail_tolerance: Optional[float] = None) -> QuantumState:
    """U(N) S_1(zeta)|vac> over the full tensor space."""
    _direct_guard(N, space)
    zetas = [zeta] + [0.0] * (space.num_modes - 1)
    state = squeezed_product(zetas, space, tail_tolerance, context=f"psi0(N={N})")
    return symmetric_splitter(N, space).apply(state).normalized()


def prepare_phi0_direct(params: GhzParams, space: FockSpace,
                        tail_tolerance: Optional[float] = None) -> QuantumState:
    """phi0(N, r1, r2): squeezed inputs S_1(-r1) S_j(r2), then the splitter."""
    _direct_guard(params.N, space)
    zetas = [-params.r1] + [params.r2] * (params.N - 1) + [0.0] * (space.num_modes - params.N)
    state = squeezed_product(zetas, space, tail_tolerance,
                             context=f"phi0(N={params.N}, k={params.k})")
    return symmetric_splitter(params.N, space).apply(state).normalized()


def local_equiv_unitary(params: GhzParams, space: FockSpace) -> Circuit:
    """U_loc = prod_l S_l(kr/(k+1)) over modes 0..N-1; empty circuit when k = 0."""
    s = params.local_squeezing
    if s == 0.0:
        return Circuit(space)
    return Circuit(space, tuple(squeeze_single(s, q, space) for q in range(params.N)))


# ============ Composite construction ============
@dataclass(frozen=True, eq=False)
class CompositeState:
    """psi0(N, -r) over composite modes, with its labels, in the rotated frame."""

    state: QuantumState
    labels: Tuple[str, ...]
    grouping: CompositeGrouping
    params: GhzParams

    @property
    def space(self) -> FockSpace:
        return self.state.space

    @property
    def cutoff(self) -> int:
        return self.state.space.cutoff

    def index(self, label: str) -> int:
        if label not in self.labels:
            raise InvalidPartitionError(f"composite {label} not present in {self.labels}",
                                        parameter="splitting")
        return self.labels.index(label)

    def indices(self, labels: Sequence[str]) -> Tuple[int, ...]:
        return tuple(self.index(label) for label in labels)

    def reduce(self, keep: Sequence[str]) -> "CompositeState":
        """Trace out every composite not listed in `keep`."""
        kept = tuple(label for label in self.labels if label in set(keep))
        if kept == self.labels:
            return self
        reduced = partial_trace(self.state, self.indices(kept))
        return replace(self, state=reduced, labels=kept)


def _chain_state(zetas: Sequence[float], weights: Sequence[float], cutoff: int,
                 tail_tolerance: Optional[float], context: str) -> QuantumState:
    space = FockSpace(cutoff, len(zetas))
    state = squeezed_product(zetas, space, tail_tolerance, context=context)
    if len(zetas) > 1:
        state = coupler_chain(weights, range(len(zetas)), space).apply(state)
    return state.normalized()


@cached(key_prefix="ghz")
def _composite_psi0(N: int, r: float, grouping: CompositeGrouping, cutoff: int,
                    tail_tolerance: Optional[float]) -> QuantumState:
    labels = grouping.labels
    weights = grouping.weights()
    return _chain_state([-r] + [0.0] * (len(labels) - 1), [weights[x] for x in labels],
                        cutoff, tail_tolerance, context=f"composite psi0 {labels}")


def prepare_composite(params: GhzParams, grouping: CompositeGrouping,
                      cutoff: Optional[int] = None,
                      tail_tolerance: Optional[float] = None) -> CompositeState:
    """
    psi0(N, -r) over the composites of `grouping`, in the rotated frame.

    The squeezed source sits in composite A and a coupler chain distributes
    it with weights sqrt(|X|/N). The source holds an even photon count below
    the cutoff, so the chain is exact and the only truncation error is the
    source tail, which the leakage guard bounds. With cutoff=None the
    cutoff is escalated from the configured default until the guard passes.
    """
    if grouping.N != params.N:
        raise ParameterError(f"grouping covers {grouping.N} modes, params have N={params.N}",
                             parameter="grouping")

    def build(c: int) -> CompositeState:
        state = _composite_psi0(params.N, params.r, grouping, c, tail_tolerance)
        return CompositeState(state, grouping.labels, grouping, params)

    if cutoff is not None:
        return build(cutoff)
    prepared, _ = escalate_cutoff(build)
    return prepared


def subtraction_operator(s: float, cutoff: int) -> np.ndarray:
    """cosh(s) b - sinh(s) b^dagger on one mode."""
    return math.cosh(s) * destroy(cutoff) - math.sinh(s) * create(cutoff)


def subtract_composite(cs: CompositeState, params: Optional[GhzParams] = None,
                       tail_tolerance: Optional[float] = None) -> Tuple[CompositeState, float]:
    """
    Heralded subtraction on composite A in the rotated frame.

    Applies cosh(s) b_A - sinh(s) b_A^dagger; the weight equals
    <b_A^dagger b_A> on phi0. The raising part is exact only while the top
    level is empty, which the tail guard checks on the input.
    """
    params = params or cs.params
    if params.local_squeezing != 0.0:
        check_tail(cs.state, tail_tolerance, context="composite subtraction", levels=1)
    local = subtraction_operator(params.local_squeezing, cs.cutoff)
    out, weight = apply_subtraction(cs.state, local, cs.index("A"))
    return replace(cs, state=out, params=params), weight


# ============ Lossy composites ============
@dataclass(frozen=True, eq=False)
class LossyComposite:
    """
    Physical-frame lossy state with A's group merged into composite "A".

    `partner` is the lossy complement mode of that group (None when A is
    alone); the subtracted mode is overlap * b_A + sqrt(1 - overlap^2) b_perp.
    """

    main: Mixture
    labels: Tuple[str, ...]
    partner: Optional[Mixture]
    overlap: float
    params: GhzParams

    @property
    def cutoff(self) -> int:
        return self.main.space.cutoff


def loss_composite(cs: CompositeState, l: float, keep: Optional[Sequence[str]] = None,
                   tail_tolerance: Optional[float] = None) -> LossyComposite:
    """
    Single-mode loss l on every composite, in the physical frame.

    The physical-frame state is rebuilt in closed form from cs's parameters
    and grouping at cs's cutoff, with A and B merged. Composites missing
    from `keep` are traced out before the loss; A is always kept. Uniform
    loss commutes with the passive rotation defining the composites, so
    per-composite loss reproduces per-physical-mode loss.
    """
    if not 0.0 <= l <= 1.0:
        raise ParameterError(f"loss parameter {l} outside [0, 1]", parameter="l")
    params, counts = cs.params, cs.grouping.counts()
    merged = {"A": counts["A"] + counts["B"], "C": counts["C"], "D": counts["D"]}
    labels = tuple(x for x, count in merged.items() if count > 0)
    s = params.local_squeezing

    state = _chain_state([-params.r1] + [s] * (len(labels) - 1),
                         [math.sqrt(merged[x] / params.N) for x in labels],
                         cs.cutoff, tail_tolerance, context=f"physical composites {labels}")
    main = Mixture.from_state(state)
    wanted = set(labels if keep is None else keep) | {"A"}
    traced = [q for q, x in enumerate(labels) if x not in wanted]
    if traced:
        main = main.trace_out(traced)
        labels = tuple(x for x in labels if x in wanted)
    main = loss_mixture(main, l, range(len(labels)))

    partner: Optional[Mixture] = None
    overlap = 1.0
    if counts["B"] > 0:
        overlap = 1.0 / math.sqrt(merged["A"])
        vacuum = squeezed_product([s], FockSpace(cs.cutoff, 1), tail_tolerance,
                                  context="complement of A")
        partner = loss_mixture(Mixture.from_state(vacuum), l, [0])
    return LossyComposite(main, labels, partner, overlap, params)


def subtract_lossy(lc: LossyComposite, keep_partner: bool = True) -> Tuple[Mixture, float]:
    """
    Plain annihilator on the subtracted physical mode of a lossy composite.

    With `keep_partner` the complement mode is appended as the last mode
    of the output. Otherwise it is traced out on the spot: only its Gram
    matrix against b_perp survives, which leaves two branches acting on
    the main composites.

    Returns:
        (normalised output mixture, <b_A^dagger b_A>)
    """
    b = destroy(lc.cutoff)
    index = lc.labels.index("A")
    main = lc.main.normalized()
    if lc.partner is None:
        return subtract_mixture(main, b, index)

    alpha = lc.overlap
    beta = math.sqrt(max(1.0 - alpha ** 2, 0.0))
    partner = lc.partner.normalized()
    if keep_partner:
        joint = main.tensor_product(partner)
        members = (alpha * joint.apply(b, [index]).members
                   + beta * joint.apply(b, [main.num_modes]).members)
        return herald_mixture(Mixture(joint.space, members), index)

    y = partner.members
    w = b @ y
    cross = alpha * beta * complex(np.vdot(w, y))
    gram = np.array([[alpha ** 2 * float(np.vdot(y, y).real), cross],
                     [np.conj(cross), beta ** 2 * float(np.vdot(w, w).real)]])
    values, vectors = np.linalg.eigh(gram)
    factor = vectors * np.sqrt(np.clip(values, 0.0, None))
    lowered = main.apply(b, [index]).members
    members = np.concatenate(
        [factor[0, j] * lowered + factor[1, j] * main.members for j in range(2)], axis=1
    )
    return herald_mixture(Mixture(main.space, members), index)


# ============ Weak-squeezing limit ============
def weak_squeezing_log_negativity(N: int, n_side: int, m_side: int) -> float:
    """log2(1 + 2 sqrt(n m)/N): subtracted-state log-negativity as zeta -> 0."""
    if n_side + m_side > N or n_side < 1 or m_side < 1:
        raise ParameterError("side sizes must be positive and fit in N", parameter="N")
    return math.log2(1.0 + 2.0 * math.sqrt(n_side * m_side) / N)


def single_excitation_state(grouping: CompositeGrouping, cutoff: int) -> QuantumState:
    """(sum_i b_i^dagger / sqrt(N))|vac> written over the composites."""
    labels = grouping.labels
    space = FockSpace(cutoff, len(labels))
    weights = grouping.weights()
    vec = np.zeros(space.dim, dtype=complex)
    for q, label in enumerate(labels):
        occupation = [0] * len(labels)
        occupation[q] = 1
        vec[np.ravel_multi_index(tuple(occupation), space.shape)] = weights[label]
    return QuantumState(space, vec)
