"""Sampling and validating SL2(C) surface-group representations.

A closed genus-2 representation is built by sampling two random images
(c, d) and solving the commutator equation [a, b] = [c, d]^{-1} by a
damped Gauss-Newton iteration, so that the surface relator
[a,b][c,d] = 1 holds to solver accuracy.  Connected sums of k blocks
assign each block's images to four consecutive generators; every
separating circle then maps to the identity, which is exactly what makes
the restrictions to capped-off blocks well defined.

A representation is *good* when it is irreducible and has no nonzero
adjoint-invariant vector (H^0 = 0); for SL2(C) irreducibility forces the
conjugation stabilizer down to the center {+-I} (Schur), so these two
checks together capture goodness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import sl2
from .errors import InvalidRepresentationError, SamplingError, GluingError
from .words import Presentation, Word, surface_presentation

RELATOR_TOL = 1e-10
IRREDUCIBILITY_TOL = 1e-6
SEPARATING_TOL = 1e-8


class Representation:
    """Assignment of unit-determinant 2x2 matrices to the generators of a
    surface-group presentation, with cached word evaluation."""

    def __init__(self, presentation: Presentation, images, seed=None,
                 method: str = "", check: bool = True):
        self.presentation = presentation
        self.images = [sl2.check_sl2(g) for g in images]
        if len(self.images) != presentation.generator_count:
            raise InvalidRepresentationError(
                f"expected {presentation.generator_count} images, "
                f"got {len(self.images)}")
        self.seed = seed
        self.method = method
        self._inverses = [sl2.sl2_inverse(g) for g in self.images]
        self._cache: dict[tuple, np.ndarray] = {}
        self._ad_cache: dict[tuple[int, int], np.ndarray] = {}
        if check:
            for rel in presentation.relators:
                r = self.relator_residual(rel)
                if r > RELATOR_TOL:
                    raise InvalidRepresentationError(
                        f"relator residual {r:.3e} exceeds {RELATOR_TOL}")

    def evaluate(self, word: Word) -> np.ndarray:
        """Ordered product of generator images over the letters of a word."""
        key = word.letters
        got = self._cache.get(key)
        if got is None:
            self.presentation.check_word(word)
            got = np.eye(2, dtype=complex)
            for i, e in key:
                got = got @ (self.images[i - 1] if e == 1 else self._inverses[i - 1])
            self._cache[key] = got
        return got

    __call__ = evaluate

    def ad(self, i: int, e: int = 1) -> np.ndarray:
        """Cached 3x3 adjoint matrix of the image of x_i^e."""
        key = (i, e)
        got = self._ad_cache.get(key)
        if got is None:
            g = self.images[i - 1] if e == 1 else self._inverses[i - 1]
            got = sl2.ad_matrix(g)
            self._ad_cache[key] = got
        return got

    def relator_residual(self, rel: Word | None = None) -> float:
        if rel is None:
            if not self.presentation.relators:
                return 0.0
            rel = self.presentation.relators[0]
        return float(np.linalg.norm(self.evaluate(rel) - np.eye(2)))

    def conjugate(self, g: np.ndarray) -> "Representation":
        g = sl2.check_sl2(g)
        ginv = sl2.sl2_inverse(g)
        return Representation(self.presentation,
                              [g @ m @ ginv for m in self.images],
                              seed=self.seed, method=self.method + "+conj")

    def restrict(self, presentation: Presentation, offset: int) -> "Representation":
        """Restriction to consecutive generators starting at ``offset``
        (0-based), reinterpreted in the given presentation."""
        n = presentation.generator_count
        return Representation(presentation, self.images[offset:offset + n],
                              seed=self.seed, method=self.method + "+restrict")


@dataclass
class GoodnessReport:
    h0_dim: int
    irreducible: bool
    trace_witness: tuple = ()
    witness_gap: float = 0.0
    is_good: bool = field(default=False)


def random_sl2(rng: np.random.Generator) -> np.ndarray:
    """Random unit-determinant matrix: i.i.d. complex Gaussian entries
    rescaled by a square root of the determinant."""
    for _ in range(100):
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        d = np.linalg.det(g)
        if abs(d) >= 1e-6:
            return g / np.sqrt(d)
    raise SamplingError("could not sample a well-conditioned SL2 matrix")


def _commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b @ sl2.sl2_inverse(a) @ sl2.sl2_inverse(b)


def _commutator_jacobian(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Complex Jacobian of vec([a,b]) with respect to the 8 entries of (a, b)."""
    ai = sl2.sl2_inverse(a)
    bi = sl2.sl2_inverse(b)
    cols = []
    basis = [np.array([[1, 0], [0, 0]], dtype=complex),
             np.array([[0, 1], [0, 0]], dtype=complex),
             np.array([[0, 0], [1, 0]], dtype=complex),
             np.array([[0, 0], [0, 1]], dtype=complex)]
    # d(a^{-1}) = -a^{-1} da a^{-1}; product rule over a b a^{-1} b^{-1}.
    for da in basis:
        d = (da @ b @ ai @ bi) - (a @ b @ ai @ da @ ai @ bi)
        cols.append(d.reshape(-1))
    for db in basis:
        d = (a @ db @ ai @ bi) - (a @ b @ ai @ bi @ db @ bi)
        cols.append(d.reshape(-1))
    return np.column_stack(cols)


def solve_commutator(t: np.ndarray, rng: np.random.Generator,
                     tol: float = 1e-13, restarts: int = 50
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Solve [a, b] = t by damped Gauss-Newton from random starts.

    Requires t to be unit-determinant and not near-parabolic
    (|tr t - 2| > 1e-6) unless t is the identity.  The commutator is
    invariant under rescaling of a and b, so determinants are normalized
    after convergence at no cost to the residual.
    """
    t = sl2.check_sl2(t)
    if np.linalg.norm(t - np.eye(2)) < 1e-12:
        eye = np.eye(2, dtype=complex)
        return eye, eye.copy()
    if abs(np.trace(t) - 2.0) <= 1e-6:
        raise SamplingError("near-parabolic commutator target; resample")
    for _ in range(restarts):
        a, b = random_sl2(rng), random_sl2(rng)
        f = (_commutator(a, b) - t).reshape(-1)
        ok = False
        for _ in range(120):
            if np.linalg.norm(f) < tol:
                ok = True
                break
            j = _commutator_jacobian(a, b)
            step, *_ = np.linalg.lstsq(j, -f, rcond=None)
            # Damped update: halve until the residual decreases.
            lam = 1.0
            for _ in range(30):
                a2 = a + lam * step[:4].reshape(2, 2)
                b2 = b + lam * step[4:].reshape(2, 2)
                f2 = (_commutator(a2, b2) - t).reshape(-1)
                if np.linalg.norm(f2) < np.linalg.norm(f):
                    a, b, f = a2, b2, f2
                    break
                lam /= 2.0
            else:
                break   # stalled; restart
        if not ok:
            continue
        a /= np.sqrt(np.linalg.det(a))
        b /= np.sqrt(np.linalg.det(b))
        if np.linalg.norm(_commutator(a, b) - t) < 10 * tol:
            return a, b
    raise SamplingError("commutator solver failed after all restarts")


def h0_dimension(rep: Representation, rel_tol: float | None = None) -> int:
    """dim of the adjoint-invariant subspace: kernel of the stacked maps
    Ad(rho(x_i)) - I."""
    from .numlin import rank_decompose
    blocks = [rep.ad(i) - np.eye(3) for i in range(1, rep.presentation.generator_count + 1)]
    return 3 - rank_decompose(np.vstack(blocks), rel_tol).rank


def check_good(rep: Representation) -> GoodnessReport:
    """Goodness = trace-witness irreducibility plus H^0 = 0.

    The witness pool is the generators and their pairwise products; a pair
    (u, v) with |tr[rho(u), rho(v)] - 2| above the threshold certifies
    irreducibility (two SL2 matrices share an eigenvector exactly when
    their commutator has trace 2).
    """
    n = rep.presentation.generator_count
    pool = [Word.gen(i) for i in range(1, n + 1)]
    pool += [Word.gen(i) * Word.gen(j) for i, j in combinations(range(1, n + 1), 2)]
    best_gap = 0.0
    witness = ()
    for u, v in combinations(pool, 2):
        gu, gv = rep.evaluate(u), rep.evaluate(v)
        gap = abs(np.trace(_commutator(gu, gv)) - 2.0)
        if gap > best_gap:
            best_gap, witness = gap, (u, v)
            if gap > 1.0:
                break   # ample margin; no need to scan further
    irreducible = best_gap > IRREDUCIBILITY_TOL
    h0 = h0_dimension(rep)
    return GoodnessReport(h0_dim=h0, irreducible=irreducible,
                          trace_witness=witness, witness_gap=best_gap,
                          is_good=irreducible and h0 == 0)


def sample_block_rep(rng: np.random.Generator, attempts: int = 100) -> Representation:
    """A good representation of the closed genus-2 surface group.

    Samples (c, d), solves [a, b] = [c, d]^{-1}, and retries until the
    result is good.
    """
    pres = surface_presentation(2, 0)
    for _ in range(attempts):
        c, d = random_sl2(rng), random_sl2(rng)
        t = sl2.sl2_inverse(_commutator(c, d))
        if abs(np.trace(t) - 2.0) <= 1e-6 and np.linalg.norm(t - np.eye(2)) > 1e-12:
            continue
        try:
            a, b = solve_commutator(t, rng)
        except SamplingError:
            continue
        rep = Representation(pres, [a, b, c, d], method="block-sample")
        if check_good(rep).is_good:
            return rep
    raise SamplingError(f"no good genus-2 representation after {attempts} attempts")


def assemble_connected_sum(blocks: list[Representation]) -> Representation:
    """Connected sum of k good genus-2 representations: block i's images
    occupy generators x_{4i-3}..x_{4i} of the closed genus-2k surface."""
    k = len(blocks)
    if k < 2:
        raise GluingError(f"connected sum needs at least 2 blocks, got {k}")
    images = []
    for i, block in enumerate(blocks):
        if block.presentation.surface != (2, 0):
            raise GluingError(f"block {i + 1} is not a closed genus-2 representation")
        if block.relator_residual() > RELATOR_TOL:
            raise GluingError(f"block {i + 1} relator residual too large")
        if not check_good(block).is_good:
            raise GluingError(f"block {i + 1} is not good")
        images.extend(block.images)
    pres = surface_presentation(2 * k, 0)
    rep = Representation(pres, images, method="connected-sum")
    for name, w in pres.boundary_words.items():
        r = float(np.linalg.norm(rep.evaluate(w) - np.eye(2)))
        if r > SEPARATING_TOL:
            raise GluingError(f"separating word {name} residual {r:.3e}")
    return rep


@dataclass
class BlockwiseReport:
    """Per-block goodness of a connected-sum representation."""

    k: int
    separating_residuals: dict[str, float]
    closed_blocks: list[GoodnessReport]
    bordered_blocks: list[GoodnessReport]
    ambient: GoodnessReport
    all_good: bool


def check_blockwise_goodness(rep: Representation, k: int) -> BlockwiseReport:
    """Validate that every genus-2 block of a connected-sum representation
    restricts to good representations, both as a closed surface (the
    separating circle maps to the identity, so the capped-off restriction
    exists) and as a bordered surface."""
    if k < 2:
        raise GluingError(f"blockwise goodness needs k >= 2 blocks, got {k}")
    pres = rep.presentation
    if pres.surface != (2 * k, 0):
        raise GluingError(f"expected a closed genus-{2 * k} representation, "
                          f"got surface {pres.surface}")
    residuals = {}
    for j in range(1, k):
        name = f"S1_{j}"
        w = pres.boundary_words[name]
        r = float(np.linalg.norm(rep.evaluate(w) - np.eye(2)))
        residuals[name] = r
        if r > SEPARATING_TOL:
            raise GluingError(
                f"separating circle {name} does not map to the identity "
                f"(residual {r:.3e}); block restrictions are undefined")
    closed_pres = surface_presentation(2, 0)
    bordered_pres = surface_presentation(2, 1)
    closed, bordered = [], []
    for i in range(k):
        closed.append(check_good(rep.restrict(closed_pres, 4 * i)))
        bordered.append(check_good(rep.restrict(bordered_pres, 4 * i)))
    ambient = check_good(rep)
    all_good = (ambient.is_good
                and all(g.is_good for g in closed)
                and all(g.is_good for g in bordered))
    return BlockwiseReport(k=k, separating_residuals=residuals,
                           closed_blocks=closed, bordered_blocks=bordered,
                           ambient=ambient, all_good=all_good)


def sample_connected_sum(k: int, rng: np.random.Generator) -> Representation:
    """Connected sum of k freshly sampled good blocks."""
    if k == 1:
        return sample_block_rep(rng)
    blocks = [sample_block_rep(rng) for _ in range(k)]
    return assemble_connected_sum(blocks)
