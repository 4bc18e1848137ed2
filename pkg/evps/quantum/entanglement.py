"""
Entanglement Measures

Logarithmic negativity E_N = log2 ||rho^{T_A}||_1, the subtraction gain
(E_after - E_before)/E_before, the label-level splitting enumeration and
the partial-trace hierarchy check.
"""

import logging
import math
from typing import Dict, List, Literal, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from ..core.config import get_settings
from ..core.errors import ContractViolationError, InvalidPartitionError
from ..schemas import EntanglementReport, HierarchyViolation, SplittingSpec
from .fock import Mixture, QuantumState, hermitian_eigenvalues, partial_trace, partial_transpose
from .splittings import classify, physical_splittings

logger = logging.getLogger(__name__)

Method = Literal["auto", "schmidt", "mixture", "eigen"]


def _check_splitting(state: Union[QuantumState, Mixture], splitting: SplittingSpec) -> None:
    if splitting.modes != tuple(range(state.num_modes)):
        raise InvalidPartitionError(
            f"splitting {splitting.label or splitting.modes} does not cover the "
            f"{state.num_modes} modes of the state",
            parameter="splitting",
        )


def _schmidt_log_negativity(state: QuantumState, side_a: Sequence[int]) -> float:
    M, d = state.num_modes, state.space.cutoff
    rest = [q for q in range(M) if q not in side_a]
    amplitudes = np.moveaxis(state.tensor(), list(side_a) + rest, list(range(M)))
    amplitudes = amplitudes.reshape(d ** len(side_a), -1)
    sigma = scipy.linalg.svdvals(amplitudes) / state.norm()
    return 2.0 * math.log2(float(np.sum(sigma)))


def _eigen_log_negativity(state: QuantumState, splitting: SplittingSpec) -> float:
    rho = partial_trace(state, splitting.kept) if splitting.traced else state.to_mixed()
    position = {q: i for i, q in enumerate(splitting.kept)}
    pt = partial_transpose(rho, [position[q] for q in splitting.side_a])
    eigenvalues = hermitian_eigenvalues(pt)
    return math.log2(float(np.sum(np.abs(eigenvalues))) / rho.norm())


def _side_basis(amplitudes: np.ndarray, tol: float) -> np.ndarray:
    """Leading left singular vectors holding all but `tol` of the weight."""
    U, sigma, _ = scipy.linalg.svd(amplitudes, full_matrices=False)
    weights = sigma ** 2
    remaining = np.cumsum(weights[::-1])[::-1]
    keep = max(int(np.count_nonzero(remaining > tol * float(np.sum(weights)))), 1)
    return U[:, :keep]


def _mixture_log_negativity(mixture: Mixture, splitting: SplittingSpec) -> float:
    """
    Partial-transpose spectrum of a factored mixture.

    Traced modes join the member index. Each side is then projected onto
    the support of its reduced state, dropping directions whose total
    weight is below the support tolerance, so the transposed matrix is
    only as large as the two supports.
    """
    if splitting.traced:
        mixture = mixture.trace_out(splitting.traced)
        position = {q: i for i, q in enumerate(splitting.kept)}
        side_a = [position[q] for q in splitting.side_a]
        side_b = [position[q] for q in splitting.side_b]
    else:
        side_a, side_b = list(splitting.side_a), list(splitting.side_b)
    d, k, J = mixture.space.cutoff, mixture.num_modes, mixture.rank
    dim_a, dim_b = d ** len(side_a), d ** len(side_b)
    tol = get_settings().support_tolerance

    members = np.moveaxis(mixture.tensor(), side_a + side_b, list(range(k)))
    members = members.reshape(dim_a, dim_b, J)
    basis_a = _side_basis(members.reshape(dim_a, -1), tol)
    members = np.einsum("ai,abj->ibj", basis_a.conj(), members)
    basis_b = _side_basis(members.transpose(1, 0, 2).reshape(dim_b, -1), tol)
    members = np.einsum("bk,ibj->ikj", basis_b.conj(), members)

    rank_a, rank_b = basis_a.shape[1], basis_b.shape[1]
    flat = members.reshape(rank_a * rank_b, J)
    rho = flat @ flat.conj().T
    trace = float(np.real(np.trace(rho)))
    pt = rho.reshape(rank_a, rank_b, rank_a, rank_b).transpose(2, 1, 0, 3)
    eigenvalues = hermitian_eigenvalues(pt.reshape(rank_a * rank_b, rank_a * rank_b))
    return math.log2(float(np.sum(np.abs(eigenvalues))) / trace)


def log_negativity(state: Union[QuantumState, Mixture], splitting: SplittingSpec,
                   method: Method = "auto") -> float:
    """
    E_N across side_a | side_b after tracing out `traced`.

    "auto" takes the Schmidt route, 2 log2 sum(singular values), for pure
    states with nothing traced, the factored-mixture route for mixtures and
    for pure states with traced modes, and the full partial-transpose
    spectrum for density operators. Round-off below zero is clamped.
    """
    _check_splitting(state, splitting)
    if method == "auto":
        if isinstance(state, Mixture):
            method = "mixture"
        elif state.is_pure:
            method = "mixture" if splitting.traced else "schmidt"
        else:
            method = "eigen"

    if method == "schmidt":
        if isinstance(state, Mixture) or not state.is_pure or splitting.traced:
            raise InvalidPartitionError("Schmidt route needs a pure state and no traced modes",
                                        parameter="method")
        value = _schmidt_log_negativity(state, splitting.side_a)
    elif method == "mixture":
        mixture = state if isinstance(state, Mixture) else Mixture.from_state(state)
        value = _mixture_log_negativity(mixture, splitting)
    else:
        dense = state.density() if isinstance(state, Mixture) else state
        value = _eigen_log_negativity(dense, splitting)

    clamp = get_settings().negativity_clamp
    if value < -clamp:
        raise ContractViolationError(f"negative log-negativity {value:.3e}", parameter="state")
    return max(value, 0.0)


def entanglement_entropy(state: QuantumState, side_a: Sequence[int]) -> float:
    """Von Neumann entropy in bits of the reduced state on side_a (pure input)."""
    if not state.is_pure:
        raise InvalidPartitionError("entropy of entanglement needs a pure state",
                                    parameter="state")
    M, d = state.num_modes, state.space.cutoff
    rest = [q for q in range(M) if q not in side_a]
    amplitudes = np.moveaxis(state.tensor(), list(side_a) + rest, list(range(M)))
    sigma = scipy.linalg.svdvals(amplitudes.reshape(d ** len(side_a), -1)) / state.norm()
    probs = sigma[sigma > 1e-15] ** 2
    return float(-np.sum(probs * np.log2(probs)))


def gain(e_after: float, e_before: float) -> Optional[float]:
    """Relative change (after - before)/before; None when before is numerically zero."""
    if e_before <= get_settings().gain_floor:
        return None
    return (e_after - e_before) / e_before


def enumerate_splittings(N: int, max_traced: int = 0, reduce: bool = False) -> List[SplittingSpec]:
    """
    Bipartite splittings of N physical modes with up to `max_traced` traced.

    With `reduce` the list collapses to one representative per canonical
    class (mode 0 as the subtracted mode), labelled with the class label.
    """
    specs = physical_splittings(N, max_traced)
    if not reduce:
        return specs
    seen: Dict[str, SplittingSpec] = {}
    for spec in specs:
        cls = classify(spec, N)
        seen.setdefault(cls.label, cls.physical_spec())
    return list(seen.values())


def _nested(child: SplittingSpec, parent: SplittingSpec) -> bool:
    if len(parent.traced) != len(child.traced) - 1:
        return False
    if not set(parent.traced) < set(child.traced):
        return False
    a, b = set(child.side_a), set(child.side_b)
    pa, pb = set(parent.side_a), set(parent.side_b)
    return (a <= pa and b <= pb) or (a <= pb and b <= pa)


def hierarchy_check(reports: Sequence[EntanglementReport],
                    slack: Optional[float] = None) -> List[HierarchyViolation]:
    """
    Check E_N(parent) >= E_N(child) for every report pair where the child
    traces out one more mode of the parent's sides.

    Applied to e_before and e_after separately; missing values are skipped.
    """
    slack = get_settings().hierarchy_slack if slack is None else slack
    violations: List[HierarchyViolation] = []
    for child in reports:
        if not child.splitting.traced:
            continue
        for parent in reports:
            if not _nested(child.splitting, parent.splitting):
                continue
            for quantity in ("e_before", "e_after"):
                p_value = getattr(parent, quantity)
                c_value = getattr(child, quantity)
                if p_value is None or c_value is None:
                    continue
                if p_value < c_value - slack:
                    violations.append(HierarchyViolation(
                        parent=parent.splitting.label, child=child.splitting.label,
                        quantity=quantity, parent_value=p_value, child_value=c_value,
                    ))
    if violations:
        logger.warning(f"{len(violations)} hierarchy violation(s) found")
    return violations
