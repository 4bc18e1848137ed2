"""
Gaussian Covariance Oracle

Covariance matrices in xxpp ordering (x_0..x_{M-1}, p_0..p_{M-1}) with the
vacuum normalised to the identity. Every pre-subtraction state of the GHZ
family is Gaussian, so its log-negativity follows from symplectic
eigenvalues without touching the Fock code.
"""

import math
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ..core.errors import ParameterError, ShapeError
from ..schemas import GhzParams, SplittingSpec
from .optics import splitter_matrix


def vacuum_covariance(num_modes: int) -> np.ndarray:
    return np.eye(2 * num_modes)


def symplectic_form(num_modes: int) -> np.ndarray:
    """Omega = [[0, I], [-I, 0]] in xxpp ordering."""
    eye = np.eye(num_modes)
    zero = np.zeros((num_modes, num_modes))
    return np.block([[zero, eye], [-eye, zero]])


def _num_modes(sigma: np.ndarray) -> int:
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise ShapeError(f"covariance must be 2M x 2M, got {sigma.shape}", parameter="sigma")
    return sigma.shape[0] // 2


def squeeze_covariance(sigma: np.ndarray, r: float, mode: int) -> np.ndarray:
    """Apply S(r) with real r: Var(x) scales by exp(-2r), Var(p) by exp(2r)."""
    M = _num_modes(sigma)
    S = np.eye(2 * M)
    S[mode, mode] = math.exp(-r)
    S[M + mode, M + mode] = math.exp(r)
    return S @ sigma @ S.T


def passive_covariance(sigma: np.ndarray, T: np.ndarray) -> np.ndarray:
    """
    Output covariance after a real passive interferometer with U a U^dagger = T a.

    The Heisenberg map is U^dagger a U = T^T a, so each quadrature block
    transforms as T^T sigma T.
    """
    M = _num_modes(sigma)
    if T.shape != (M, M):
        raise ShapeError(f"mode matrix must be {M}x{M}, got {T.shape}", parameter="T")
    L = np.zeros((2 * M, 2 * M))
    L[:M, :M] = T.T
    L[M:, M:] = T.T
    return L @ sigma @ L.T


def loss_covariance(sigma: np.ndarray, l: float) -> np.ndarray:
    """Uniform loss: sigma -> (1 - l) sigma + l I."""
    if not 0.0 <= l <= 1.0:
        raise ParameterError(f"loss parameter {l} outside [0, 1]", parameter="l")
    return (1.0 - l) * sigma + l * np.eye(sigma.shape[0])


def ghz_covariance(params: GhzParams, loss: float = 0.0) -> np.ndarray:
    """Covariance of phi0(N, r1, r2), optionally after uniform loss."""
    N = params.N
    sigma = squeeze_covariance(vacuum_covariance(N), -params.r1, 0)
    for q in range(1, N):
        sigma = squeeze_covariance(sigma, params.r2, q)
    sigma = passive_covariance(sigma, splitter_matrix(N))
    return loss_covariance(sigma, loss) if loss else sigma


def tmsv_covariance(r: float) -> np.ndarray:
    """Two-mode squeezed vacuum with squeezing r."""
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    return np.array([
        [c, s, 0, 0],
        [s, c, 0, 0],
        [0, 0, c, -s],
        [0, 0, -s, c],
    ])


def reduce_covariance(sigma: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    M = _num_modes(sigma)
    keep = list(keep)
    index = keep + [M + q for q in keep]
    return sigma[np.ix_(index, index)]


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Moduli of the eigenvalues of i Omega sigma, one per mode, ascending."""
    M = _num_modes(sigma)
    values = np.abs(scipy.linalg.eigvals(1j * symplectic_form(M) @ sigma))
    return np.sort(values)[::2]


def partial_transpose_covariance(sigma: np.ndarray, modes: Sequence[int]) -> np.ndarray:
    """Flip p on `modes`."""
    M = _num_modes(sigma)
    flip = np.ones(2 * M)
    for q in modes:
        flip[M + q] = -1.0
    return sigma * np.outer(flip, flip)


def gaussian_log_negativity(sigma: np.ndarray, splitting: SplittingSpec) -> float:
    """sum over max(0, -log2 nu) of the partially transposed reduced covariance."""
    kept = list(splitting.kept)
    reduced = reduce_covariance(sigma, kept)
    position = {q: i for i, q in enumerate(kept)}
    transposed = partial_transpose_covariance(reduced, [position[q] for q in splitting.side_a])
    nu = symplectic_eigenvalues(transposed)
    return float(sum(max(0.0, -math.log2(v)) for v in nu))


def ghz_log_negativity(params: GhzParams, splitting: SplittingSpec,
                       loss: Optional[float] = None) -> float:
    """Pre-subtraction log-negativity of phi0 over physical modes."""
    return gaussian_log_negativity(ghz_covariance(params, loss or 0.0), splitting)
