"""The Lie algebra sl2(C), its Killing form and adjoint action.

Conventions used throughout the package:

* the Killing form is ``B(A, B) = 4 Tr(AB)``;
* Lie-algebra elements are stored as coordinate 3-vectors in the fixed
  B-orthonormal basis ``A1 = H/(2 sqrt 2)``, ``A2 = (E+F)/(2 sqrt 2)``,
  ``A3 = (E-F)/(2 sqrt 2 i)``, where H, E, F is the standard basis of
  traceless 2x2 matrices;
* B is complex bilinear (not Hermitian), so in these coordinates
  ``B(u, v) = sum_i u_i v_i`` with no conjugation.

The adjoint action of g in SL2(C) is ``v -> g v g^{-1}``; in the
orthonormal coordinates it is a complex-orthogonal 3x3 matrix.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidRepresentationError, WordError

_SQRT8 = 2.0 * np.sqrt(2.0)

# Standard sl2 basis.
H = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
E = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
F = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

# B-orthonormal basis, shape (3, 2, 2).
_BASIS = np.stack([H / _SQRT8, (E + F) / _SQRT8, (E - F) / (_SQRT8 * 1j)])

DET_TOL = 1e-10


def killing_form(a: np.ndarray, b: np.ndarray) -> complex:
    """B(a, b) = 4 Tr(ab) for 2x2 matrices a, b."""
    return 4.0 * np.trace(a @ b)


def orthonormal_basis() -> np.ndarray:
    """The fixed B-orthonormal basis as an array of shape (3, 2, 2)."""
    return _BASIS.copy()


def to_matrix(coords: np.ndarray) -> np.ndarray:
    """Coordinate 3-vector -> traceless 2x2 matrix."""
    coords = np.asarray(coords, dtype=complex)
    return np.tensordot(coords, _BASIS, axes=(0, 0))


def to_coords(m: np.ndarray) -> np.ndarray:
    """Traceless 2x2 matrix -> coordinate 3-vector (B-projection)."""
    # B(m, A_i) recovers the i-th coordinate since the basis is B-orthonormal.
    return np.array([killing_form(m, _BASIS[i]) for i in range(3)])


def check_sl2(g: np.ndarray, tol: float = DET_TOL) -> np.ndarray:
    """Validate |det g - 1| <= tol and return g as a complex array."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2):
        raise WordError(f"expected a 2x2 matrix, got shape {g.shape}")
    if abs(np.linalg.det(g) - 1.0) > tol:
        raise InvalidRepresentationError(
            f"matrix determinant {np.linalg.det(g)} is not 1 within {tol}")
    return g


def sl2_inverse(g: np.ndarray) -> np.ndarray:
    """Inverse via the adjugate, dividing by det for accuracy."""
    d = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / d


def adjoint(g: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Ad_g applied to a coordinate vector v: coords of g V g^{-1}."""
    g = check_sl2(g)
    return ad_matrix(g) @ np.asarray(v, dtype=complex)


def ad_matrix(g: np.ndarray) -> np.ndarray:
    """3x3 matrix of Ad_g in the orthonormal coordinates."""
    ginv = sl2_inverse(g)
    cols = [to_coords(g @ _BASIS[j] @ ginv) for j in range(3)]
    return np.column_stack(cols)


def ad_ring(rep, z) -> np.ndarray:
    """Image of a group-ring element under Ad o rho, as a 3x3 matrix.

    ``z`` is a GroupRingElement (integer combination of words over the
    generators of ``rep``); the result is the Z-linear combination of the
    adjoint matrices of the word images.
    """
    out = np.zeros((3, 3), dtype=complex)
    for coeff, word in z.terms():
        out += coeff * ad_matrix(rep.evaluate(word))
    return out
