"""Monomial-basis compressions of the operators acting on weighted Hardy spaces.

Matrices are dense complex ``numpy`` arrays. Entry ``(i, j)`` is the
coefficient of ``z^i`` in the image of ``z^j``: columns are images of
monomials. Gram matrices use ``G[i, j] = <x_j, x_i>``, which makes them the
``X^* X`` product of the coefficient matrix and therefore Hermitian PSD.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import svdvals, toeplitz

from .series import BlaschkeProduct, PowerSeries, blaschke_series
from .weights import WeightSequence

__all__ = [
    "mult_matrix",
    "transformation_matrix",
    "scale_conjugate",
    "scale_ratios",
    "left_shift_matrix",
    "bbar_of_S",
    "leftinv_residual",
    "kernel_dimension",
    "gram",
    "gram_factored",
    "diag_dw",
    "diag_dplus",
    "is_lower_toeplitz",
]


def mult_matrix(f: PowerSeries, N: int) -> np.ndarray:
    """Lower-triangular Toeplitz compression of ``M_f``: ``A[i, j] = f_{i-j}``."""
    if f.order < N:
        raise ValueError(f"symbol order {f.order} < N = {N}")
    col = f.coeffs[:N]
    return toeplitz(col, np.zeros(N, np.complex128))


def is_lower_toeplitz(A: np.ndarray) -> bool:
    if np.any(np.triu(A, 1) != 0):
        return False
    return bool(np.all(A[1:, 1:] == A[:-1, :-1]))


def transformation_matrix(F, N: int, rows: int | None = None) -> np.ndarray:
    """Matrix whose column ``j`` holds the coefficients of ``F[j]``.

    ``rows`` defaults to ``N``; taller matrices keep the parts of each column
    that a square compression would cut off.
    """
    rows = N if rows is None else rows
    if len(F) < N:
        raise ValueError(f"need {N} series, got {len(F)}")
    X = np.empty((rows, N), np.complex128)
    for j in range(N):
        f = F[j]
        if f.order < rows:
            raise ValueError(f"series {j} has order {f.order} < {rows}")
        X[:, j] = f.coeffs[:rows]
    return X


def scale_ratios(seq: WeightSequence, rows: int, cols: int, col_index=None) -> np.ndarray:
    """``beta_i / beta_{c(j)}`` as a ``rows x cols`` array, formed in the log domain.

    ``col_index`` maps column ``j`` to the weight index used for its
    normalization (default ``c(j) = j``).
    """
    n = max(rows, cols if col_index is None else int(np.max(col_index)) + 1)
    lb = seq.log_betas(n)
    lcol = lb[:cols] if col_index is None else lb[np.asarray(col_index)]
    return np.exp(lb[:rows, None] - lcol[None, :])


def scale_conjugate(X: np.ndarray, seq: WeightSequence, direction: str = "beta") -> np.ndarray:
    """``D_beta X D_beta^{-1}`` (``direction="beta"``) or ``D_beta^{-1} X D_beta``."""
    rows, cols = X.shape
    R = scale_ratios(seq, rows, cols)
    if direction == "beta":
        return X * R
    if direction == "beta_inverse":
        return X / R
    raise ValueError("direction must be 'beta' or 'beta_inverse'")


def left_shift_matrix(N: int) -> np.ndarray:
    """Backward shift ``S f = (f - f(0))/z``: ones on the superdiagonal."""
    return np.eye(N, k=1, dtype=np.complex128)


def bbar_of_S(b: BlaschkeProduct, N: int) -> np.ndarray:
    """Compression of ``sum_k conj(B_k) S^k``: upper Toeplitz, ``A[i, j] = conj(B_{j-i})``."""
    c = np.conj(blaschke_series(b, N).coeffs)
    return toeplitz(np.r_[c[0], np.zeros(N - 1)], c)


def leftinv_residual(b: BlaschkeProduct, N: int, frac: float = 0.9) -> float:
    """Max-entry deviation of ``conj(B)(S) B(M_z)`` from ``I`` on the leading ``ceil(frac N)`` block.

    Entries near the bottom-right corner miss the tail ``sum_{k>=N}`` and are
    excluded; on the retained block the error decays like ``rho^(2(1-frac)N)``.
    """
    P = bbar_of_S(b, N) @ mult_matrix(blaschke_series(b, N), N)
    k = math.ceil(frac * N)
    return float(np.max(np.abs(P[:k, :k] - np.eye(k))))


def kernel_dimension(A: np.ndarray, tol: float = 1e-6) -> int:
    """Number of singular values below ``tol``."""
    return int(np.sum(svdvals(A) < tol))


def gram(F, seq: WeightSequence, normalized: bool = False, norm_index=None) -> np.ndarray:
    """Gram matrix ``G[i, j] = <f_j, f_i>_beta`` of a family of equal-order series.

    With ``normalized=True`` the family is ``f_n / beta_{c(n)}`` where ``c`` is
    ``norm_index`` (identity by default). For the identity that Gram matrix
    equals ``(D^{-1} X^* D)(D X D^{-1})`` for the transformation matrix ``X``.
    """
    order = F[0].order
    if any(f.order != order for f in F):
        raise ValueError("all series must share one order")
    X = np.column_stack([f.coeffs for f in F])
    if normalized:
        Y = X * scale_ratios(seq, order, len(F), norm_index)
    else:
        Y = X * np.exp(seq.log_betas(order))[:, None]
    G = Y.conj().T @ Y
    return 0.5 * (G + G.conj().T)


def gram_factored(X: np.ndarray, seq: WeightSequence) -> np.ndarray:
    """``(D^{-1} X^* D)(D X D^{-1})`` for a (possibly tall) transformation matrix ``X``."""
    left = scale_conjugate(X.conj().T, seq, "beta_inverse")
    right = scale_conjugate(X, seq, "beta")
    return left @ right


def diag_dw(seq: WeightSequence, N: int) -> np.ndarray:
    """``diag(w_1, ..., w_N)``: coefficient ``k`` scaled by ``w_{k+1}``."""
    return np.diag(seq.w(np.arange(1, N + 1)).astype(np.complex128))


def diag_dplus(N: int) -> np.ndarray:
    """``diag((k+2)/(k+1))``: 2, 3/2, 4/3, ..."""
    k = np.arange(N, dtype=np.float64)
    return np.diag(((k + 2) / (k + 1)).astype(np.complex128))

