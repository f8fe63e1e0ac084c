"""Dense complex linear-algebra kernels.

Everything here is SVD-based: ranks and kernels come from singular value
thresholds relative to the largest singular value, preimages are
minimum-norm least-squares solutions, and Pfaffians are computed by
skew-symmetric elimination with partial pivoting (Parlett-Reid).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (IllConditionedError, NotInImageError, NumericError,
                     ShapeError)

#: Default relative rank tolerance, overridable globally.
default_rank_tol = 1e-9

COND_LIMIT = 1e12


def _as_cmatrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise NumericError("matrix has non-finite entries")
    return a


@dataclass
class RankData:
    """Rank, orthonormal kernel and image bases of a matrix."""

    rank: int
    kernel_basis: np.ndarray   # columns span Ker A
    image_basis: np.ndarray    # columns span Im A (orthonormal)
    tolerance_used: float


def rank_decompose(a, rel_tol: float | None = None) -> RankData:
    """SVD rank/kernel/image of a complex matrix.

    The rank counts singular values above ``rel_tol * sigma_max``; a zero
    matrix has rank 0 and full kernel.
    """
    a = _as_cmatrix(a)
    if rel_tol is None:
        rel_tol = default_rank_tol
    if not 0.0 < rel_tol < 1.0:
        raise NumericError(f"rel_tol must be in (0,1), got {rel_tol}")
    m, n = a.shape
    if m == 0 or n == 0:
        return RankData(0, np.eye(n, dtype=complex),
                        np.zeros((m, 0), dtype=complex), 0.0)
    u, s, vh = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        rank = 0
        thresh = 0.0
    else:
        thresh = rel_tol * smax
        rank = int(np.sum(s > thresh))
    kernel = vh[rank:, :].conj().T
    image = u[:, :rank]
    return RankData(rank, kernel, image, thresh)


def min_norm_preimage(a, b, residual_tol: float = 1e-8) -> np.ndarray:
    """Minimum-norm solution x of A x = b, column by column.

    Raises NotInImageError if some column of b is not in Im A within
    ``residual_tol`` relative residual.
    """
    a = _as_cmatrix(a)
    b = np.asarray(b, dtype=complex)
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    if b.shape[0] != a.shape[0]:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = a @ x - b
    scale = np.linalg.norm(b, axis=0)
    bad = np.linalg.norm(resid, axis=0) > residual_tol * np.maximum(scale, 1e-300)
    if np.any(bad & (scale > 0)):
        raise NotInImageError(
            f"{int(np.sum(bad))} column(s) not in the image within {residual_tol}")
    return x[:, 0] if squeeze else x


def transition_det(new_basis, old_basis) -> complex:
    """det(M) where old_basis . M = new_basis (both square column sets)."""
    new = _as_cmatrix(new_basis)
    old = _as_cmatrix(old_basis)
    if new.shape != old.shape or new.shape[0] != new.shape[1]:
        raise ShapeError(f"bases must be square and equal-shaped, "
                         f"got {new.shape} and {old.shape}")
    if new.shape[0] == 0:
        return 1.0 + 0.0j
    if np.linalg.cond(old) > COND_LIMIT:
        raise IllConditionedError("old basis is numerically singular")
    return complex(np.linalg.det(np.linalg.solve(old, new)))


def pfaffian(w, sym_tol: float = 1e-8) -> complex:
    """Pfaffian of an antisymmetric matrix by Parlett-Reid elimination.

    The input is antisymmetrized after a symmetry check
    ``||W + W^T|| <= sym_tol * ||W||``; Pf(W)^2 = det(W).
    """
    w = _as_cmatrix(w)
    n, m = w.shape
    if n != m or n % 2 != 0:
        raise ShapeError(f"Pfaffian needs an even-dimensional square matrix, got {w.shape}")
    if n == 0:
        return 1.0 + 0.0j
    norm = np.linalg.norm(w)
    if norm > 0 and np.linalg.norm(w + w.T) > sym_tol * norm:
        raise NumericError("matrix is not antisymmetric within tolerance")
    a = (w - w.T) / 2.0
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        # Partial pivot: move the largest entry of column k into row k+1.
        col = np.abs(a[k + 1:, k])
        p = int(np.argmax(col)) + k + 1
        if col.max() == 0.0:
            return 0.0 + 0.0j
        if p != k + 1:
            a[[k + 1, p], :] = a[[p, k + 1], :]
            a[:, [k + 1, p]] = a[:, [p, k + 1]]
            pf = -pf
        pf *= a[k, k + 1]
        if k + 2 < n:
            # Congruence by the Gauss transform zeroing row/column k in the
            # trailing block; unit determinant, so Pf is unchanged.
            tau = a[k, k + 2:] / a[k, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, a[k + 2:, k + 1])
            a[k + 2:, k + 2:] -= np.outer(a[k + 2:, k + 1], tau)
    return complex(pf)


def orthonormal_columns(a, rel_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column span of a."""
    return rank_decompose(a, rel_tol).image_basis


def project_off(a, basis) -> np.ndarray:
    """Project the columns of a onto the orthogonal complement of the
    (orthonormal) columns of basis."""
    if basis.shape[1] == 0:
        return a.copy()
    return a - basis @ (basis.conj().T @ a)


def complete_basis(existing, pool, cond_limit: float = COND_LIMIT) -> np.ndarray:
    """Greedy completion of ``existing`` columns to a full basis, drawing
    from the columns of ``pool``.

    Returns the indices of the chosen pool columns.  Picks at each step the
    pool column with the largest residual after projection onto the span
    built so far.
    """
    existing = _as_cmatrix(existing)
    pool = _as_cmatrix(pool)
    d = existing.shape[0]
    need = d - existing.shape[1]
    if need < 0:
        raise ShapeError("existing basis has too many columns")
    q = orthonormal_columns(existing) if existing.shape[1] else \
        np.zeros((d, 0), dtype=complex)
    chosen: list[int] = []
    for _ in range(need):
        resid = project_off(pool, q)
        norms = np.linalg.norm(resid, axis=0)
        for i in chosen:
            norms[i] = -1.0
        j = int(np.argmax(norms))
        if norms[j] <= 0:
            raise IllConditionedError("pool does not span the missing directions")
        chosen.append(j)
        newcol = resid[:, j] / norms[j]
        q = np.column_stack([q, newcol])
    full = np.column_stack([pool[:, chosen], existing]) if need else existing
    if full.shape[1] and np.linalg.cond(full) > cond_limit:
        raise IllConditionedError("completed basis is ill conditioned")
    return np.array(chosen, dtype=int)
