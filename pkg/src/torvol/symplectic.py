"""The Goldman symplectic form on H^1 and its Pfaffian volume.

A twisted 1-cocycle is the same thing as a crossed homomorphism
``u: pi_1 -> sl2`` with ``u(gh) = u(g) + Ad rho(g) u(h)``, determined by
its generator values.  The cup product of two cocycles, paired through
the Killing form and evaluated on the fundamental 2-cell attached along
the relator r = y_1 ... y_L, is the prefix sum

    omega(u, v) = sum_j  B( u(w_{j-1}),  Ad rho(w_{j-1}) . v(y_j) ),

with w_j the j-th prefix of r.  On cocycle classes of a good
representation this pairing is antisymmetric and nondegenerate, vanishes
on coboundaries, and its Pfaffian in a basis h of H^1 matches the
torsion magnitude |T(h)| -- the Witten identity tying the two volume
forms together.  The top wedge power of the form evaluates as
``omega^n(h_1 ^ ... ^ h_2n) = n! Pf(W)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numlin
from .cochain import CohomologyData, check_cocycle
from .errors import NumericError, ShapeError
from .reps import Representation
from .torsion import TorsionValue, torsion
from .words import Word

GRAM_SYM_TOL = 1e-8


def letter_value(rep: Representation, values: np.ndarray, i: int, e: int) -> np.ndarray:
    """Crossed-homomorphism value on a single letter x_i^e.

    ``values`` has shape (2g, 3): one sl2 coordinate row per generator.
    """
    if e == 1:
        return values[i - 1]
    return -(rep.ad(i, -1) @ values[i - 1])


def crossed_eval(rep: Representation, u, w: Word) -> np.ndarray:
    """Evaluate a 1-cocycle (given by generator values) on a word.

    ``u`` is either a flat vector of length 3*(2g) in the geometric basis
    or an array of shape (2g, 3).
    """
    values = np.asarray(u, dtype=complex)
    if values.ndim == 1:
        values = values.reshape(-1, 3)
    if values.shape != (rep.presentation.generator_count, 3):
        raise ShapeError(f"cocycle values have shape {values.shape}")
    out = np.zeros(3, dtype=complex)
    prefix_ad = np.eye(3, dtype=complex)
    for i, e in w.letters:
        out = out + prefix_ad @ letter_value(rep, values, i, e)
        prefix_ad = prefix_ad @ rep.ad(i, e)
    return out


def cup_pair(rep: Representation, relator: Word, u, v) -> complex:
    """Goldman pairing of two cocycles on the fundamental 2-cell.

    The 2-cell attached along r = y_1 ... y_L maps to the bar-resolution
    chain with one term per letter: ``[w_{j-1} | x]`` for a positive
    letter ``y_j = x`` and ``-[w_j | x]`` for an inverse letter
    ``y_j = x^{-1}`` (prefix including the letter), which is what makes
    the boundary telescope onto the Fox expansion of r.  Evaluating the
    cup cochain ``(u ~ v)(g, h) = B(u(g), Ad rho(g) v(h))`` on that chain
    gives the pairing below.
    """
    uv = np.asarray(u, dtype=complex).reshape(-1, 3)
    vv = np.asarray(v, dtype=complex).reshape(-1, 3)
    total = 0.0 + 0.0j
    u_prefix = np.zeros(3, dtype=complex)
    prefix_ad = np.eye(3, dtype=complex)
    for i, e in relator.letters:
        # Killing form in orthonormal coordinates: plain bilinear dot.
        if e == 1:
            total += np.sum(u_prefix * (prefix_ad @ vv[i - 1]))
            u_prefix = u_prefix + prefix_ad @ uv[i - 1]
            prefix_ad = prefix_ad @ rep.ad(i)
        else:
            u_prefix = u_prefix + prefix_ad @ letter_value(rep, uv, i, -1)
            prefix_ad = prefix_ad @ rep.ad(i, -1)
            total -= np.sum(u_prefix * (prefix_ad @ vv[i - 1]))
    return complex(total)


@dataclass
class SymplecticGram:
    """Antisymmetric Gram matrix of the Goldman form with its Pfaffian."""

    gram: np.ndarray
    basis: np.ndarray        # the cocycle columns used
    pf: complex

    @property
    def size(self) -> int:
        return self.gram.shape[0]

    def volume(self) -> float:
        """|omega^n| evaluated on the basis 2n-vector: n! |Pf|."""
        n = self.size // 2
        return float(math.factorial(n)) * abs(self.pf)


def gram(coh: CohomologyData, rep: Representation, relator: Word,
         h_basis: np.ndarray | None = None) -> SymplecticGram:
    """Gram matrix W_ij = omega(h_i, h_j) of the Goldman form on H^1.

    Requires H^0 = H^2 = 0 (a good representation).  ``h_basis`` defaults
    to the harmonic representatives; otherwise it is a matrix of cocycle
    columns in the geometric basis.
    """
    if coh.dims[0] != 0 or (len(coh.dims) > 2 and coh.dims[2] != 0):
        raise NumericError("Goldman Gram matrix needs H^0 = H^2 = 0")
    basis = coh.representatives[1] if h_basis is None else np.asarray(
        h_basis, dtype=complex)
    check_cocycle(coh.complex, 1, basis)
    m = basis.shape[1]
    if m % 2 != 0:
        raise ShapeError(f"H^1 dimension {m} is odd")
    w = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            w[i, j] = cup_pair(rep, relator, basis[:, i], basis[:, j])
    sym = np.linalg.norm(w + w.T)
    if sym > GRAM_SYM_TOL * max(np.linalg.norm(w), 1e-300):
        raise NumericError(
            f"cup pairing is not antisymmetric (defect {sym:.3e}); "
            "the prefix formula was fed non-cocycles")
    w = (w - w.T) / 2.0
    return SymplecticGram(gram=w, basis=basis, pf=numlin.pfaffian(w))


def witten_check(cx, coh: CohomologyData, rep: Representation,
                 h_basis: np.ndarray | None = None) -> dict:
    """Relative gap between |T(h)| and |Pf(W(h))| on a closed surface."""
    relator = rep.presentation.relators[0]
    g = gram(coh, rep, relator, h_basis)
    basis = g.basis
    t = torsion(cx, [None, basis, None])
    p = abs(g.pf)
    return {
        "torsion": t,
        "pfaffian": g.pf,
        "torsion_abs": t.magnitude,
        "pfaffian_abs": p,
        "rel_err": abs(t.magnitude - p) / p,
        "h1": basis.shape[1],
    }
