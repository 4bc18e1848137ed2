"""
Optics Module

Gates and channels of the photonic circuit: directional coupler (beam
splitter), single- and two-mode squeezers, the N-mode symmetric splitter,
uniform beam-splitter loss and heralded photon subtraction.

Beam-splitter convention: the coupler on modes (i, j) acts on mode
operators as

    U^dagger a_i U = sin(t) a_i + cos(t) a_j
    U^dagger a_j U = cos(t) a_i - sin(t) a_j

The matrix is symmetric and its own inverse, so U a U^dagger obeys the same
map. It has determinant -1, which no exponential of a passive generator
reaches, so the unitary is built as a pi phase on mode j composed with
exp((pi/2 - t)(a_i^dagger a_j - a_i a_j^dagger)).
"""

import logging
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..core.cache import cached
from ..core.config import get_settings
from ..core.errors import (
    CutoffTooSmallError,
    InvalidWiringError,
    NoPhotonError,
    ParameterError,
    ShapeError,
)
from ..schemas import LossSpec, SqueezeParam
from .fock import Circuit, FockSpace, Mixture, ModeOperator, QuantumState, destroy, expm_unitary

logger = logging.getLogger(__name__)

ZetaLike = Union[SqueezeParam, complex, float]


def as_zeta(zeta: ZetaLike) -> complex:
    if isinstance(zeta, SqueezeParam):
        return zeta.zeta
    return complex(zeta)


def _check_pair(i: int, j: int, space: FockSpace) -> None:
    if i == j:
        raise InvalidWiringError(f"two-mode gate wired to mode {i} twice", parameter="modes")
    for q in (i, j):
        if not 0 <= q < space.num_modes:
            raise InvalidWiringError(f"mode {q} outside space with {space.num_modes} modes",
                                     parameter="modes")


def _pair_operators(d: int) -> Tuple[np.ndarray, np.ndarray]:
    a = destroy(d)
    eye = np.eye(d, dtype=complex)
    return np.kron(a, eye), np.kron(eye, a)


# ============ Mode matrices ============
def beam_splitter_matrix(theta: float) -> np.ndarray:
    s, c = math.sin(theta), math.cos(theta)
    return np.array([[s, c], [c, -s]])


def _chain_angles(weights: Sequence[float]) -> Tuple[float, ...]:
    """Coupler angles sending the first mode to sum_q w_q a_q along a chain."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or not math.isclose(float(np.sum(w ** 2)), 1.0, abs_tol=1e-12):
        raise ParameterError("coupling weights must be non-negative with unit norm",
                             parameter="weights")
    angles = []
    remaining = 1.0
    for q in range(len(w) - 1):
        ratio = 0.0 if remaining <= 0 else min(w[q] / remaining, 1.0)
        angles.append(math.asin(ratio))
        remaining = math.sqrt(max(remaining ** 2 - w[q] ** 2, 0.0))
    return tuple(angles)


def chain_matrix(weights: Sequence[float]) -> np.ndarray:
    """
    Real orthogonal T with U a_q U^dagger = sum_p T_qp a_p for the coupler chain.

    Row 0 of T equals `weights`.
    """
    angles = _chain_angles(weights)
    n = len(angles) + 1
    T = np.eye(n)
    for q, theta in enumerate(angles):
        step = np.eye(n)
        step[q:q + 2, q:q + 2] = beam_splitter_matrix(theta)
        T = T @ step
    return T


def splitter_matrix(N: int) -> np.ndarray:
    """Bogoliubov matrix of the symmetric splitter; first row is uniform 1/sqrt(N)."""
    if N < 1:
        raise ShapeError(f"splitter needs at least one mode, got {N}", parameter="N")
    return chain_matrix([1.0 / math.sqrt(N)] * N)


# ============ Gates ============
def beam_splitter(theta: float, i: int, j: int, space: FockSpace) -> ModeOperator:
    """Phase-free directional coupler on modes (i, j)."""
    _check_pair(i, j, space)
    d = space.cutoff
    ai, aj = _pair_operators(d)
    generator = (math.pi / 2 - theta) * (ai.conj().T @ aj - ai @ aj.conj().T)
    exp_part = expm_unitary(ModeOperator(space, generator, (i, j))).matrix
    parity = np.kron(np.eye(d), np.diag((-1.0) ** np.arange(d))).astype(complex)
    return ModeOperator(space, parity @ exp_part, (i, j), unitary=True)


def squeeze_single(zeta: ZetaLike, k: int, space: FockSpace) -> ModeOperator:
    """S(zeta) = exp((zeta* a^2 - zeta a^dagger^2)/2) on mode k."""
    z = as_zeta(zeta)
    (k,) = space.check_modes([k])
    a = destroy(space.cutoff)
    ad = a.conj().T
    generator = 0.5 * (np.conj(z) * (a @ a) - z * (ad @ ad))
    return expm_unitary(ModeOperator(space, generator, (k,)))


def squeeze_two(zeta: ZetaLike, m: int, n: int, space: FockSpace) -> ModeOperator:
    """S_mn(zeta) = exp(zeta* a_m a_n - zeta a_m^dagger a_n^dagger)."""
    _check_pair(m, n, space)
    z = as_zeta(zeta)
    am, an = _pair_operators(space.cutoff)
    generator = np.conj(z) * (am @ an) - z * (am.conj().T @ an.conj().T)
    return expm_unitary(ModeOperator(space, generator, (m, n)))


def coupler_chain(weights: Sequence[float], modes: Sequence[int], space: FockSpace) -> Circuit:
    """
    Chain of couplers sending modes[0] to sum_q weights[q] a_{modes[q]}.

    Gates act in chain order, the coupler on (modes[0], modes[1]) first.
    """
    if len(weights) != len(modes):
        raise ShapeError("one weight per mode is required", parameter="weights")
    modes = space.check_modes(modes)
    gates = tuple(
        beam_splitter(theta, modes[q], modes[q + 1], space)
        for q, theta in enumerate(_chain_angles(weights))
    )
    return Circuit(space, gates)


def symmetric_splitter(N: int, space: FockSpace) -> Circuit:
    """
    N-mode symmetric splitter B_{N-1,N}(arcsin 1/sqrt 2) ... B_{1,2}(arcsin 1/sqrt N).

    Acts on modes 0..N-1; U a_0 U^dagger = (a_0 + ... + a_{N-1})/sqrt(N).
    """
    if N < 1 or N > space.num_modes:
        raise ShapeError(f"splitter over {N} modes does not fit a {space.num_modes}-mode space",
                         parameter="N")
    return coupler_chain([1.0 / math.sqrt(N)] * N, range(N), space)


# ============ Closed-form inputs ============
def squeezed_vacuum(zeta: ZetaLike, cutoff: int) -> Tuple[np.ndarray, float]:
    """
    Number-basis amplitudes of S(zeta)|0> on `cutoff` levels.

    Returns the amplitudes and the probability that falls above the top
    level. c_0 = 1/sqrt(cosh r) and c_2n = c_2n-2 (-e^{i theta} tanh r)
    sqrt((2n-1)/(2n)); odd amplitudes vanish.
    """
    if int(cutoff) != cutoff or cutoff < 2:
        raise ShapeError(f"cutoff must be an integer >= 2, got {cutoff}", parameter="cutoff")
    z = as_zeta(zeta)
    r = abs(z)
    ratio = -np.exp(1j * np.angle(z)) * math.tanh(r)
    amps = np.zeros(cutoff, dtype=complex)
    amps[0] = 1.0 / math.sqrt(math.cosh(r))
    for n in range(2, cutoff, 2):
        amps[n] = amps[n - 2] * ratio * math.sqrt((n - 1) / n)
    lost = max(1.0 - float(np.sum(np.abs(amps) ** 2)), 0.0)
    return amps, lost


def squeezed_product(zetas: Sequence[ZetaLike], space: FockSpace,
                     tail_tolerance: Optional[float] = None,
                     context: str = "squeezed input") -> QuantumState:
    """
    prod_q S_q(zetas[q])|vac> over the first len(zetas) modes of `space`.

    The leakage is the probability cut by each mode's truncation plus,
    when several modes are squeezed, the probability in total-photon blocks
    at or above the cutoff, where passive gates applied afterwards stop
    being exact. Leakage at or above the tail tolerance raises
    CutoffTooSmallError. The returned state is normalised.
    """
    d = space.cutoff
    if len(zetas) != space.num_modes:
        raise ShapeError(f"expected {space.num_modes} squeezing values, got {len(zetas)}",
                         parameter="zetas")
    tol = get_settings().tail_tolerance if tail_tolerance is None else tail_tolerance
    vec = np.ones(1, dtype=complex)
    kept = 1.0
    totals = np.ones(1)
    for zeta in zetas:
        amps, lost = squeezed_vacuum(zeta, d)
        vec = np.kron(vec, amps)
        kept *= 1.0 - lost
        totals = np.convolve(totals, np.abs(amps) ** 2)
    leak = (1.0 - kept) + float(np.sum(totals[d:]))
    if leak >= tol:
        raise CutoffTooSmallError(
            f"{context}: leakage {leak:.3e} exceeds {tol:.1e} at cutoff {d}",
            cutoff=d,
            tail=leak,
        )
    return QuantumState.from_vector(space, vec)


# ============ Channels ============
@cached(key_prefix="optics")
def loss_kraus(l: float, cutoff: int) -> Tuple[np.ndarray, ...]:
    """
    Kraus operators of a coupler to a vacuum ancilla followed by tracing it.

    The coupler angle is the complement of the loss angle so that a single
    photon survives with probability 1 - l.
    """
    pair = FockSpace(cutoff, 2)
    theta = math.asin(math.sqrt(1.0 - l))
    U = beam_splitter(theta, 0, 1, pair).matrix.reshape(cutoff, cutoff, cutoff, cutoff)
    return tuple(np.ascontiguousarray(U[:, j, :, 0]) for j in range(cutoff))


def _check_loss(l: float) -> None:
    if not 0.0 <= l <= 1.0:
        raise ParameterError(f"loss parameter {l} outside [0, 1]", parameter="l")


def loss_mixture(mixture: Mixture, l: float, modes: Sequence[int]) -> Mixture:
    """Uniform loss l on each of `modes`, keeping the mixture factored."""
    _check_loss(l)
    modes = mixture.space.check_modes(modes)
    if l == 0.0:
        return mixture
    kraus = loss_kraus(float(l), mixture.space.cutoff)
    for q in modes:
        mixture = mixture.kraus(kraus, q)
    return mixture


def loss_channel(state: QuantumState, spec: LossSpec) -> QuantumState:
    """Uniform loss l on every mode in spec.applies_to; output is mixed."""
    _check_loss(spec.l)
    modes = state.space.check_modes(spec.applies_to)
    rho = state.normalized().to_mixed()
    if spec.l == 0.0:
        return rho
    return loss_mixture(Mixture.from_state(rho), spec.l, modes).density().normalized()


# ============ Subtraction ============
def apply_subtraction(state: QuantumState, local: np.ndarray,
                      mode: int) -> Tuple[QuantumState, float]:
    """
    Apply a single-mode subtraction operator and renormalise.

    Returns the normalised output and its weight <O^dagger O> on the
    normalised input.
    """
    threshold = get_settings().no_photon_threshold
    source = state.normalized()
    out = ModeOperator(state.space, local, (mode,)).apply(source)
    weight = out.norm() ** 2 if out.is_pure else out.norm()
    if weight < threshold:
        raise NoPhotonError(f"no photon to subtract in mode {mode} (weight {weight:.2e})",
                            parameter="mode")
    normalized = out.normalized()
    return QuantumState(state.space, normalized.data, weight=weight), float(weight)


def subtract_photon(state: QuantumState, mode: int) -> Tuple[QuantumState, float]:
    """Heralded single-photon subtraction b|psi> on `mode`; weight is <b^dagger b>."""
    (mode,) = state.space.check_modes([mode])
    return apply_subtraction(state, destroy(state.space.cutoff), mode)


def herald_mixture(out: Mixture, mode: int) -> Tuple[Mixture, float]:
    """Normalise an unnormalised subtraction output; its trace is the weight."""
    weight = out.trace()
    if weight < get_settings().no_photon_threshold:
        raise NoPhotonError(f"no photon to subtract in mode {mode} (weight {weight:.2e})",
                            parameter="mode")
    return out.normalized(), float(weight)


def subtract_mixture(mixture: Mixture, local: np.ndarray,
                     mode: int) -> Tuple[Mixture, float]:
    """apply_subtraction for a factored mixed state."""
    return herald_mixture(mixture.normalized().apply(local, [mode]), mode)
