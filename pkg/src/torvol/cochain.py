"""Twisted cochain complexes of surfaces, disks and circles.

The cell models are the smallest ones available: a point for the disk,
one 0-cell and one 1-cell for the circle, a wedge of 2g circles for the
bordered surface, and the one-relator presentation complex (one 0-cell,
2g 1-cells, one 2-cell) for the closed surface.  With coefficients in
sl2(C) twisted by Ad o rho the differentials are

    delta0 v      = ( Ad rho(x_i) v - v )_i,
    (delta1 u)    = sum_i  Ad(d r / d x_i)  u_i,

where d r / d x_i is the Fox derivative of the relator.  For the circle
carrying a holonomy word s, delta0 = Ad rho(s) - I; holonomies within
1e-8 of the identity are snapped to zero so that pure roundoff cannot
masquerade as rank.

Cohomology representatives are harmonic style: orthonormal cocycles
orthogonal to the coboundary subspace, so the class projector is just
the conjugate transpose of the representative matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numlin, sl2
from .errors import NotACocycleError, NumericError, ShapeError
from .reps import Representation
from .words import Presentation, Word, fox_boundary

CIRCLE_SNAP_TOL = 1e-8
COCYCLE_TOL = 1e-8


@dataclass
class TwistedComplex:
    """Per-degree dimensions and coboundary matrices in geometric bases."""

    dims: tuple[int, ...]
    deltas: tuple[np.ndarray, ...]   # deltas[p]: C^p -> C^{p+1}

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def delta_from(self, p: int) -> np.ndarray | None:
        """Outgoing differential at degree p (None at the top)."""
        return self.deltas[p] if p < len(self.deltas) else None

    def delta_into(self, p: int) -> np.ndarray | None:
        """Incoming differential at degree p (None at the bottom)."""
        return self.deltas[p - 1] if p >= 1 else None

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * d for p, d in enumerate(self.dims))


def delta0_matrix(rep: Representation) -> np.ndarray:
    n = rep.presentation.generator_count
    eye = np.eye(3)
    return np.vstack([rep.ad(i) - eye for i in range(1, n + 1)])


def delta1_matrix(rep: Representation, relator: Word) -> np.ndarray:
    n = rep.presentation.generator_count
    blocks = [sl2.ad_ring(rep, d) for d in fox_boundary(relator, n)]
    return np.hstack(blocks)


def build_complex(pres: Presentation, rep: Representation) -> TwistedComplex:
    """Twisted cochain complex of a closed or bordered surface."""
    if rep.presentation.generator_count != pres.generator_count:
        raise ShapeError("representation does not match the presentation")
    n = pres.generator_count
    d0 = delta0_matrix(rep)
    if pres.relators:
        d1 = delta1_matrix(rep, pres.relators[0])
        scale = max(np.linalg.norm(d0), np.linalg.norm(d1), 1.0)
        if np.linalg.norm(d1 @ d0) > 1e-10 * scale:
            raise NumericError("delta1 . delta0 != 0: relator does not hold")
        return TwistedComplex(dims=(3, 3 * n, 3), deltas=(d0, d1))
    return TwistedComplex(dims=(3, 3 * n), deltas=(d0,))


def disk_complex() -> TwistedComplex:
    """The disk: a single 0-cell, C^0 = sl2."""
    return TwistedComplex(dims=(3,), deltas=())


def circle_complex(rep: Representation, s: Word) -> TwistedComplex:
    """Circle with holonomy rho(s); near-identity holonomy snaps to zero."""
    d0 = sl2.ad_matrix(rep.evaluate(s)) - np.eye(3)
    if np.linalg.norm(d0) < CIRCLE_SNAP_TOL:
        d0 = np.zeros((3, 3), dtype=complex)
    return TwistedComplex(dims=(3, 3), deltas=(d0,))


@dataclass
class CohomologyData:
    """Dimensions, harmonic cocycle representatives and class projectors."""

    complex: TwistedComplex
    dims: tuple[int, ...]
    representatives: tuple[np.ndarray, ...]   # d_p x h_p cocycle columns
    image_bases: tuple[np.ndarray, ...]       # orthonormal bases of Im delta_{p-1}

    def projector(self, p: int) -> np.ndarray:
        """Class coordinates of a cocycle: rows form the left inverse of the
        representative matrix that kills coboundaries."""
        return self.representatives[p].conj().T


def cohomology(cx: TwistedComplex, tol: float | None = None) -> CohomologyData:
    """Harmonic-style cohomology of a twisted complex.

    Representatives at degree p are an orthonormal basis of
    Ker(delta_p) intersected with the orthogonal complement of
    Im(delta_{p-1}).
    """
    dims = []
    reps = []
    images = []
    for p in range(len(cx.dims)):
        d_out = cx.delta_from(p)
        d_in = cx.delta_into(p)
        if d_out is not None:
            kernel = numlin.rank_decompose(d_out, tol).kernel_basis
        else:
            kernel = np.eye(cx.dims[p], dtype=complex)
        if d_in is not None:
            image = numlin.rank_decompose(d_in, tol).image_basis
        else:
            image = np.zeros((cx.dims[p], 0), dtype=complex)
        h = kernel.shape[1] - image.shape[1]
        if h < 0:
            raise NumericError(
                f"negative cohomology dimension at degree {p}; "
                "rank tolerances are inconsistent")
        # Kernel columns are unit vectors, so the singular values of the
        # projection are absolute: threshold them directly rather than
        # relative to the largest (which may be pure roundoff).
        proj = numlin.project_off(kernel, image)
        if proj.size:
            u, s, _ = np.linalg.svd(proj)
            r = int(np.sum(s > (tol or numlin.default_rank_tol)))
            harm = u[:, :r]
        else:
            harm = np.zeros((cx.dims[p], 0), dtype=complex)
        if harm.shape[1] != h:
            raise NumericError(
                f"harmonic representative count {harm.shape[1]} != {h} at degree {p}")
        dims.append(h)
        reps.append(harm)
        images.append(image)
    return CohomologyData(complex=cx, dims=tuple(dims),
                          representatives=tuple(reps),
                          image_bases=tuple(images))


def check_cocycle(cx: TwistedComplex, p: int, z: np.ndarray,
                  tol: float = COCYCLE_TOL) -> None:
    d_out = cx.delta_from(p)
    if d_out is None:
        return
    z = np.atleast_2d(np.asarray(z, dtype=complex).T).T
    scale = max(np.linalg.norm(d_out), 1.0) * np.maximum(
        np.linalg.norm(z, axis=0), 1e-300)
    if np.any(np.linalg.norm(d_out @ z, axis=0) > tol * scale):
        raise NotACocycleError(f"input at degree {p} is not a cocycle")


def class_coordinates(coh: CohomologyData, p: int, z: np.ndarray) -> np.ndarray:
    """Coordinates of a cocycle in the harmonic representative basis,
    modulo coboundaries."""
    check_cocycle(coh.complex, p, z)
    return coh.projector(p) @ z


def cocycles_from_coordinates(coh: CohomologyData, p: int,
                              coords: np.ndarray) -> np.ndarray:
    """Representative cocycles for given class coordinates."""
    return coh.representatives[p] @ coords
