"""
Truncated Fock Space Module

Dense linear algebra over products of truncated bosonic modes.

Mode-ordering convention: mode 0 is the leftmost (slowest-varying) tensor
factor. A basis state |n_0, n_1, ..., n_{M-1}> sits at flat index
sum_q n_q * d**(M-1-q), i.e. numpy C order over shape (d,)*M. Every
reshape in this package relies on that ordering.

Operators are stored as a local matrix together with the modes they act
on; the local factor is ordered the same way over its own modes. Full
matrices over the whole space are only materialised on request.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from ..core.config import get_settings
from ..core.errors import (
    ContractViolationError,
    CutoffTooSmallError,
    InvalidPartitionError,
    InvalidSpaceError,
    ShapeError,
)

logger = logging.getLogger(__name__)


# ============ Spaces ============
@dataclass(frozen=True)
class FockSpace:
    """Product of `num_modes` modes, each truncated to `cutoff` levels."""

    cutoff: int
    num_modes: int = 1

    def __post_init__(self) -> None:
        if int(self.cutoff) != self.cutoff or self.cutoff < 2:
            raise InvalidSpaceError(f"cutoff must be an integer >= 2, got {self.cutoff}",
                                    parameter="cutoff")
        if int(self.num_modes) != self.num_modes or self.num_modes < 1:
            raise InvalidSpaceError(f"num_modes must be a positive integer, got {self.num_modes}",
                                    parameter="num_modes")

    @property
    def dim(self) -> int:
        return int(self.cutoff) ** int(self.num_modes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.cutoff,) * self.num_modes

    def check_modes(self, modes: Iterable[int]) -> Tuple[int, ...]:
        """Return `modes` as a tuple after checking range and distinctness."""
        modes = tuple(int(q) for q in modes)
        if len(set(modes)) != len(modes):
            raise ShapeError(f"repeated mode in {modes}", parameter="modes")
        for q in modes:
            if not 0 <= q < self.num_modes:
                raise ShapeError(f"mode {q} outside space with {self.num_modes} modes",
                                 parameter="modes")
        return modes

    def with_modes(self, num_modes: int) -> "FockSpace":
        return FockSpace(self.cutoff, num_modes)


# ============ Single-mode matrices ============
def destroy(cutoff: int) -> np.ndarray:
    """Annihilation operator with <n-1|a|n> = sqrt(n) on `cutoff` levels."""
    if int(cutoff) != cutoff or cutoff < 2:
        raise InvalidSpaceError(f"cutoff must be an integer >= 2, got {cutoff}", parameter="cutoff")
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)


def create(cutoff: int) -> np.ndarray:
    return destroy(cutoff).conj().T


def number(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff, dtype=float)).astype(complex)


# ============ Tensor helpers ============
def _apply_to_axes(tensor: np.ndarray, matrix: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract `matrix` into the given axes of `tensor`, keeping axis order."""
    k = len(axes)
    front = list(range(k))
    moved = np.moveaxis(tensor, list(axes), front)
    shape = moved.shape
    local_dim = int(np.prod(shape[:k]))
    out = (matrix @ moved.reshape(local_dim, -1)).reshape(shape)
    return np.moveaxis(out, front, list(axes))


# ============ States ============
@dataclass(frozen=True, eq=False)
class QuantumState:
    """
    Pure state vector (1-D) or density operator (2-D) over a FockSpace.

    `weight` records the norm (pure) or trace (mixed) the payload had
    before its last normalisation.
    """

    space: FockSpace
    data: np.ndarray
    weight: float = 1.0

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=complex)
        dim = self.space.dim
        if data.shape not in ((dim,), (dim, dim)):
            raise ShapeError(
                f"payload shape {data.shape} does not match space dimension {dim}",
                parameter="data",
            )
        object.__setattr__(self, "data", data)

    # -- constructors --
    @classmethod
    def vacuum(cls, space: FockSpace) -> "QuantumState":
        vec = np.zeros(space.dim, dtype=complex)
        vec[0] = 1.0
        return cls(space, vec)

    @classmethod
    def basis(cls, space: FockSpace, occupations: Sequence[int]) -> "QuantumState":
        """Number state |n_0, ..., n_{M-1}>."""
        if len(occupations) != space.num_modes:
            raise ShapeError(f"expected {space.num_modes} occupations, got {len(occupations)}",
                             parameter="occupations")
        if any(not 0 <= n < space.cutoff for n in occupations):
            raise ShapeError(f"occupation outside cutoff {space.cutoff}", parameter="occupations")
        vec = np.zeros(space.dim, dtype=complex)
        vec[np.ravel_multi_index(tuple(occupations), space.shape)] = 1.0
        return cls(space, vec)

    @classmethod
    def from_vector(cls, space: FockSpace, vector: np.ndarray,
                    normalize: bool = True) -> "QuantumState":
        state = cls(space, vector)
        return state.normalized() if normalize else state

    @classmethod
    def from_density(cls, space: FockSpace, rho: np.ndarray,
                     normalize: bool = True) -> "QuantumState":
        state = cls(space, np.asarray(rho, dtype=complex).reshape(space.dim, space.dim))
        return state.normalized() if normalize else state

    # -- basic properties --
    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def num_modes(self) -> int:
        return self.space.num_modes

    def norm(self) -> float:
        """Euclidean norm (pure) or trace (mixed)."""
        if self.is_pure:
            return float(np.linalg.norm(self.data))
        return float(np.real(np.trace(self.data)))

    def normalized(self) -> "QuantumState":
        n = self.norm()
        if n <= 0.0:
            raise ShapeError("cannot normalise a zero state", parameter="state")
        return QuantumState(self.space, self.data / n, weight=n)

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def to_mixed(self) -> "QuantumState":
        if not self.is_pure:
            return self
        return QuantumState(self.space, self.density(), weight=self.weight)

    def tensor(self) -> np.ndarray:
        """Payload reshaped to (d,)*M for pure or (d,)*2M for mixed states."""
        shape = self.space.shape
        return self.data.reshape(shape if self.is_pure else shape + shape)

    def populations(self) -> np.ndarray:
        """Joint photon-number distribution as a (d,)*M array."""
        if self.is_pure:
            probs = np.abs(self.data) ** 2
        else:
            probs = np.real(np.diag(self.data))
        return probs.reshape(self.space.shape) / self.norm() ** (2 if self.is_pure else 1)

    def mode_populations(self, mode: int) -> np.ndarray:
        """Marginal photon-number distribution of one mode."""
        (mode,) = self.space.check_modes([mode])
        probs = self.populations()
        others = tuple(q for q in range(self.num_modes) if q != mode)
        return probs.sum(axis=others) if others else probs

    def tail_mass(self, levels: int = 2) -> float:
        """
        Largest population of the top `levels` levels over all modes.

        Squeezers and passive gates move photons in pairs or conserve them,
        so an even-parity state can leave the top level empty while the
        level below it is occupied; the default counts both.
        """
        probs = self.populations()
        tails = []
        for q in range(self.num_modes):
            others = tuple(p for p in range(self.num_modes) if p != q)
            marginal = probs.sum(axis=others) if others else probs
            tails.append(float(np.sum(marginal[-levels:])))
        return max(tails)

    def expectation(self, op: Union["ModeOperator", np.ndarray]) -> complex:
        """<op> with respect to the normalised state."""
        if isinstance(op, ModeOperator):
            applied = op.apply(self).data
        else:
            applied = np.asarray(op) @ self.data
        if self.is_pure:
            return complex(np.vdot(self.data, applied)) / self.norm() ** 2
        return complex(np.trace(applied)) / self.norm()

    def check(self, tol: Optional[float] = None) -> None:
        """Raise if the normalised-state invariants do not hold."""
        tol = get_settings().hermitian_tolerance if tol is None else tol
        if self.is_pure:
            if abs(self.norm() - 1.0) > tol:
                raise ContractViolationError(f"pure state norm {self.norm()} != 1")
            return
        rho = self.data
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise ContractViolationError("density operator is not Hermitian")
        if abs(self.norm() - 1.0) > tol:
            raise ContractViolationError(f"density operator trace {self.norm()} != 1")
        if scipy.linalg.eigvalsh(rho).min() < -tol:
            raise ContractViolationError("density operator has negative eigenvalues")


def check_tail(state: QuantumState, tol: Optional[float] = None, context: str = "state",
               levels: int = 2) -> float:
    """Return the tail mass, raising CutoffTooSmallError above `tol`."""
    tol = get_settings().tail_tolerance if tol is None else tol
    tail = state.tail_mass(levels)
    if tail >= tol:
        raise CutoffTooSmallError(
            f"{context}: population of the top {levels} level(s) {tail:.3e} exceeds {tol:.1e} "
            f"at cutoff {state.space.cutoff}",
            cutoff=state.space.cutoff,
            tail=tail,
        )
    return tail


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """Fidelity between two states, at least one of them pure."""
    if a.space != b.space:
        raise ShapeError("states live in different spaces", parameter="state")
    a, b = a.normalized(), b.normalized()
    if a.is_pure and b.is_pure:
        return float(abs(np.vdot(a.data, b.data)) ** 2)
    if not a.is_pure and not b.is_pure:
        raise ShapeError("fidelity needs at least one pure state", parameter="state")
    pure, mixed = (a, b) if a.is_pure else (b, a)
    return float(np.real(np.vdot(pure.data, mixed.data @ pure.data)))


# ============ Mixtures ============
@dataclass(frozen=True, eq=False)
class Mixture:
    """
    Unnormalised mixture sum_j |v_j><v_j| over a FockSpace.

    `members` has shape (dim, J), one column per member. Channels and
    partial traces only ever grow the member index, so large mixed states
    stay factored instead of being expanded into dim x dim densities.
    """

    space: FockSpace
    members: np.ndarray

    def __post_init__(self) -> None:
        members = np.asarray(self.members, dtype=complex)
        if members.ndim == 1:
            members = members[:, None]
        if members.ndim != 2 or members.shape[0] != self.space.dim:
            raise ShapeError(
                f"members shape {members.shape} does not match space dimension {self.space.dim}",
                parameter="members",
            )
        object.__setattr__(self, "members", members)

    @classmethod
    def from_state(cls, state: QuantumState, floor: Optional[float] = None) -> "Mixture":
        """Pure states become one member; densities are split along their eigenvectors."""
        if state.is_pure:
            return cls(state.space, state.data)
        floor = get_settings().mixture_floor if floor is None else floor
        w, V = scipy.linalg.eigh(0.5 * (state.data + state.data.conj().T))
        keep = w > floor * float(np.sum(np.clip(w, 0.0, None)))
        return cls(state.space, V[:, keep] * np.sqrt(w[keep]))

    @property
    def num_modes(self) -> int:
        return self.space.num_modes

    @property
    def rank(self) -> int:
        return self.members.shape[1]

    def trace(self) -> float:
        return float(np.sum(np.abs(self.members) ** 2))

    def normalized(self) -> "Mixture":
        t = self.trace()
        if t <= 0.0:
            raise ShapeError("cannot normalise a zero mixture", parameter="mixture")
        return Mixture(self.space, self.members / math.sqrt(t))

    def tensor(self) -> np.ndarray:
        """Members reshaped to (d,)*M + (J,)."""
        return self.members.reshape(self.space.shape + (self.rank,))

    def density(self) -> QuantumState:
        return QuantumState(self.space, self.members @ self.members.conj().T)

    def apply(self, matrix: np.ndarray, modes: Sequence[int]) -> "Mixture":
        """Apply a local operator to every member (unnormalised)."""
        modes = self.space.check_modes(modes)
        out = _apply_to_axes(self.tensor(), np.asarray(matrix, dtype=complex), modes)
        return Mixture(self.space, out.reshape(self.space.dim, self.rank))

    def kraus(self, operators: Sequence[np.ndarray], mode: int,
              floor: Optional[float] = None) -> "Mixture":
        """Single-mode channel sum_j K_j rho K_j^dagger; negligible branches are dropped."""
        (mode,) = self.space.check_modes([mode])
        floor = get_settings().mixture_floor if floor is None else floor
        branches = [self.apply(K, [mode]).members for K in operators]
        stacked = np.concatenate(branches, axis=1)
        norms = np.sum(np.abs(stacked) ** 2, axis=0)
        keep = norms > floor * float(np.sum(norms))
        return Mixture(self.space, stacked[:, keep]).compress(floor)

    def compress(self, floor: Optional[float] = None) -> "Mixture":
        """
        Re-express the mixture on its eigenvectors, dropping eigenvalues below
        `floor` times the trace. The discarded weight bounds the trace-norm
        change.
        """
        floor = get_settings().mixture_floor if floor is None else floor
        if self.rank <= 1:
            return self
        U, sigma, _ = scipy.linalg.svd(self.members, full_matrices=False,
                                       lapack_driver="gesvd")
        weights = sigma ** 2
        keep = weights > floor * float(np.sum(weights))
        return Mixture(self.space, U[:, keep] * sigma[keep])

    def trace_out(self, modes: Sequence[int]) -> "Mixture":
        """
        Fold `modes` into the member index.

        Remaining modes are renumbered 0..k-1 in ascending order.
        """
        M, d = self.num_modes, self.space.cutoff
        traced = _check_partition(modes, M, "traced")
        keep = [q for q in range(M) if q not in traced]
        if not keep:
            raise InvalidPartitionError("cannot trace out every mode", parameter="traced")
        moved = np.moveaxis(self.tensor(), keep + traced, list(range(M)))
        members = moved.reshape(d ** len(keep), -1)
        norms = np.sum(np.abs(members) ** 2, axis=0)
        return Mixture(self.space.with_modes(len(keep)), members[:, norms > 0.0])

    def tensor_product(self, other: "Mixture") -> "Mixture":
        """Mixture over self's modes followed by other's; member count multiplies."""
        if other.space.cutoff != self.space.cutoff:
            raise ShapeError("mixtures have different cutoffs", parameter="mixture")
        members = np.einsum("aj,bk->abjk", self.members, other.members)
        space = self.space.with_modes(self.num_modes + other.num_modes)
        return Mixture(space, members.reshape(space.dim, -1))


# ============ Operators ============
@dataclass(frozen=True, eq=False)
class ModeOperator:
    """
    Operator acting on `modes` of `space` through a local matrix.

    With `modes` covering every mode in natural order the matrix is the full
    operator. `unitary` tags operators produced by unitary constructions.
    """

    space: FockSpace
    matrix: np.ndarray
    modes: Tuple[int, ...] = field(default=())
    unitary: bool = False

    def __post_init__(self) -> None:
        modes = self.modes or tuple(range(self.space.num_modes))
        modes = self.space.check_modes(modes)
        matrix = np.asarray(self.matrix, dtype=complex)
        local_dim = self.space.cutoff ** len(modes)
        if matrix.shape != (local_dim, local_dim):
            raise ShapeError(
                f"matrix shape {matrix.shape} does not match {len(modes)} mode(s) "
                f"at cutoff {self.space.cutoff}",
                parameter="matrix",
            )
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "matrix", matrix)

    @property
    def is_full(self) -> bool:
        return self.modes == tuple(range(self.space.num_modes))

    def full(self) -> np.ndarray:
        """Matrix over the whole space."""
        if self.is_full:
            return self.matrix
        return embed(self.matrix, self.modes, self.space).matrix

    def dagger(self) -> "ModeOperator":
        return replace(self, matrix=self.matrix.conj().T)

    def apply(self, state: QuantumState) -> QuantumState:
        """Return op|psi> for pure or op rho op^dagger for mixed input (unnormalised)."""
        if state.space != self.space:
            raise ShapeError("operator and state live in different spaces", parameter="state")
        M = self.space.num_modes
        tensor = state.tensor()
        out = _apply_to_axes(tensor, self.matrix, self.modes)
        if not state.is_pure:
            out = _apply_to_axes(out, self.matrix.conj(), [M + q for q in self.modes])
        return QuantumState(self.space, out.reshape(state.data.shape), weight=state.weight)

    def unitarity_error(self) -> float:
        """max |U^dagger U - I| over the local matrix."""
        u = self.matrix
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))

    def __matmul__(self, other: "ModeOperator") -> "ModeOperator":
        """Operator product self * other on the union of their supports."""
        if other.space != self.space:
            raise ShapeError("operators live in different spaces", parameter="operator")
        support = tuple(sorted(set(self.modes) | set(other.modes)))
        sub = self.space.with_modes(len(support))
        position = {q: i for i, q in enumerate(support)}
        left = embed(self.matrix, [position[q] for q in self.modes], sub).matrix
        right = embed(other.matrix, [position[q] for q in other.modes], sub).matrix
        return ModeOperator(self.space, left @ right, support,
                            unitary=self.unitary and other.unitary)


def embed(op: np.ndarray, target_modes: Sequence[int], space: FockSpace) -> ModeOperator:
    """
    Tensor `op` with the identity on every mode outside `target_modes`.

    The factor ordering inside `op` follows the order of `target_modes`.
    """
    targets = space.check_modes(target_modes)
    d, M, k = space.cutoff, space.num_modes, len(targets)
    op = np.asarray(op, dtype=complex)
    if op.shape != (d ** k, d ** k):
        raise ShapeError(
            f"operator shape {op.shape} does not match {k} mode(s) at cutoff {d}",
            parameter="op",
        )
    rest = [q for q in range(M) if q not in targets]
    full = np.kron(op, np.eye(d ** (M - k), dtype=complex))
    order = list(targets) + rest
    perm = list(np.argsort(order))
    tensor = full.reshape((d,) * (2 * M)).transpose(perm + [M + p for p in perm])
    return ModeOperator(space, tensor.reshape(space.dim, space.dim))


def swap(i: int, j: int, space: FockSpace) -> ModeOperator:
    """Permutation operator exchanging modes i and j."""
    if i == j:
        raise ShapeError("swap needs two different modes", parameter="modes")
    d = space.cutoff
    local = np.eye(d * d, dtype=complex).reshape(d, d, d, d).transpose(1, 0, 2, 3)
    return ModeOperator(space, local.reshape(d * d, d * d), (i, j), unitary=True)


def expm_unitary(generator: ModeOperator, tol: Optional[float] = None) -> ModeOperator:
    """
    exp(G) for an anti-Hermitian generator G.

    Uses the Hermitian eigendecomposition i G = V diag(w) V^dagger and
    rebuilds U = V exp(-i diag(w)) V^dagger, which is unitary to round-off.
    """
    settings = get_settings()
    tol = settings.hermitian_tolerance if tol is None else tol
    G = generator.matrix
    deviation = float(np.max(np.abs(G + G.conj().T))) if G.size else 0.0
    if deviation > tol:
        raise ContractViolationError(
            f"generator is not anti-Hermitian (deviation {deviation:.2e})", parameter="generator"
        )
    H = 1j * G
    H = 0.5 * (H + H.conj().T)
    w, V = scipy.linalg.eigh(H)
    U = (V * np.exp(-1j * w)) @ V.conj().T
    op = ModeOperator(generator.space, U, generator.modes, unitary=True)
    error = op.unitarity_error()
    if error > settings.unitary_tolerance:
        raise ContractViolationError(f"exponential not unitary (error {error:.2e})")
    return op


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gate sequence; gates[0] acts first."""

    space: FockSpace
    gates: Tuple[ModeOperator, ...] = ()

    def apply(self, state: QuantumState) -> QuantumState:
        for gate in self.gates:
            state = gate.apply(state)
        return state

    def then(self, other: "Circuit") -> "Circuit":
        return Circuit(self.space, self.gates + other.gates)

    def dagger(self) -> "Circuit":
        return Circuit(self.space, tuple(g.dagger() for g in reversed(self.gates)))

    def to_operator(self) -> ModeOperator:
        """Product of all gates as one full-space operator."""
        result = np.eye(self.space.dim, dtype=complex)
        for gate in self.gates:
            result = gate.full() @ result
        return ModeOperator(self.space, result, unitary=all(g.unitary for g in self.gates))


# ============ Reductions ============
def _check_partition(modes: Iterable[int], num_modes: int, what: str) -> List[int]:
    modes = [int(q) for q in modes]
    if not modes:
        raise InvalidPartitionError(f"{what} must be nonempty", parameter=what)
    if len(set(modes)) != len(modes):
        raise InvalidPartitionError(f"{what} has repeated modes", parameter=what)
    if any(not 0 <= q < num_modes for q in modes):
        raise InvalidPartitionError(f"{what} outside {num_modes} modes", parameter=what)
    return sorted(modes)


def partial_trace(state: QuantumState, keep_modes: Sequence[int]) -> QuantumState:
    """
    Reduced density operator on `keep_modes`.

    Kept modes are renumbered 0..k-1 in ascending order of their original
    index.
    """
    M, d = state.num_modes, state.space.cutoff
    keep = _check_partition(keep_modes, M, "keep_modes")
    traced = [q for q in range(M) if q not in keep]
    k = len(keep)
    sub = state.space.with_modes(k)
    if state.is_pure:
        moved = np.moveaxis(state.tensor(), keep + traced, list(range(M)))
        moved = moved.reshape(d ** k, -1)
        return QuantumState(sub, moved @ moved.conj().T, weight=state.weight)
    order = keep + traced
    tensor = state.tensor().transpose(order + [M + q for q in order])
    tensor = tensor.reshape(d ** k, d ** (M - k), d ** k, d ** (M - k))
    return QuantumState(sub, np.einsum("ajbj->ab", tensor), weight=state.weight)


def partial_transpose(state: QuantumState, transpose_modes: Sequence[int]) -> np.ndarray:
    """Density matrix with the indices of `transpose_modes` transposed."""
    M = state.num_modes
    modes = _check_partition(transpose_modes, M, "transpose_modes")
    if len(modes) == M:
        raise InvalidPartitionError("transpose set must be a proper subset", parameter="transpose_modes")
    shape = state.space.shape
    tensor = state.density().reshape(shape + shape)
    axes = list(range(2 * M))
    for q in modes:
        axes[q], axes[M + q] = axes[M + q], axes[q]
    return tensor.transpose(axes).reshape(state.space.dim, state.space.dim)


def hermitian_eigenvalues(m: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Real spectrum of a Hermitian matrix, ascending."""
    tol = get_settings().hermitian_tolerance if tol is None else tol
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got {m.shape}", parameter="m")
    deviation = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if deviation > tol:
        raise ContractViolationError(f"matrix is not Hermitian (deviation {deviation:.2e})",
                                     parameter="m")
    return scipy.linalg.eigvalsh(0.5 * (m + m.conj().T))
