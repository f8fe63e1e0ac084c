"""Free-group words, surface-group presentations and Fox calculus.

Words are sequences of letters ``(i, e)`` with 1-based generator index
``i`` and exponent ``e = +1 or -1``.  Words are stored as given and
reduced lazily; equality and hashing use the freely reduced form.

Surface presentations follow the standard one-relator model: the closed
orientable surface of genus g has generators ``x_1 .. x_{2g}`` and the
single relator ``[x1,x2][x3,x4]...[x_{2g-1},x_{2g}]``; the bordered
surface with one boundary circle is free on the same generators, with
the same product as its boundary word.  For even genus ``2k`` the
partial products of the first j genus-2 blocks are recorded as the
separating circles ``S1_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnsupportedSurfaceError, WordError

Letter = tuple[int, int]


class Word:
    """A word in a free group, as a tuple of (generator, +-1) letters."""

    __slots__ = ("letters", "_reduced")

    def __init__(self, letters=()):
        self.letters = tuple((int(i), int(e)) for i, e in letters)
        for i, e in self.letters:
            if i < 1 or e not in (1, -1):
                raise WordError(f"bad letter ({i}, {e})")
        self._reduced = None

    @classmethod
    def gen(cls, i: int, e: int = 1) -> "Word":
        return cls(((i, e),))

    @classmethod
    def identity(cls) -> "Word":
        return cls()

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((i, -e) for i, e in reversed(self.letters)))

    def reduced(self) -> "Word":
        """Freely reduced form (no x x^{-1} adjacencies)."""
        if self._reduced is None:
            stack: list[Letter] = []
            for let in self.letters:
                if stack and stack[-1][0] == let[0] and stack[-1][1] == -let[1]:
                    stack.pop()
                else:
                    stack.append(let)
            w = Word(stack)
            w._reduced = w
            self._reduced = w
        return self._reduced

    def max_generator(self) -> int:
        return max((i for i, _ in self.letters), default=0)

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.reduced().letters == other.reduced().letters

    def __hash__(self) -> int:
        return hash(self.reduced().letters)

    def __repr__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for i, e in self.letters:
            parts.append(f"x{i}" if e == 1 else f"x{i}^-1")
        return "*".join(parts)


def commutator(a: Word, b: Word) -> Word:
    return a * b * a.inverse() * b.inverse()


class GroupRing:
    """Finite integer combination of words: an element of Z[F]."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        acc: dict[Word, int] = {}
        for coeff, word in terms:
            w = word.reduced()
            acc[w] = acc.get(w, 0) + int(coeff)
        self._terms = {w: c for w, c in acc.items() if c != 0}

    @classmethod
    def zero(cls) -> "GroupRing":
        return cls()

    @classmethod
    def one(cls) -> "GroupRing":
        return cls(((1, Word.identity()),))

    @classmethod
    def of(cls, word: Word, coeff: int = 1) -> "GroupRing":
        return cls(((coeff, word),))

    def terms(self):
        """Iterate (coefficient, word) pairs."""
        return [(c, w) for w, c in self._terms.items()]

    def __add__(self, other: "GroupRing") -> "GroupRing":
        return GroupRing(self.terms() + other.terms())

    def __sub__(self, other: "GroupRing") -> "GroupRing":
        return GroupRing(self.terms() + [(-c, w) for c, w in other.terms()])

    def __neg__(self) -> "GroupRing":
        return GroupRing([(-c, w) for c, w in self.terms()])

    def left_mul(self, word: Word) -> "GroupRing":
        """Multiply every term by ``word`` on the left."""
        return GroupRing([(c, word * w) for c, w in self.terms()])

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRing):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*{w!r}" for w, c in self._terms.items())


@dataclass(frozen=True)
class Presentation:
    """Presentation of a surface group (or bordered surface free group)."""

    generator_count: int
    relators: tuple[Word, ...]
    boundary_words: dict[str, Word] = field(default_factory=dict, compare=False)
    surface: tuple[int, int] = (0, 0)   # (genus, boundary count)

    @property
    def genus(self) -> int:
        return self.surface[0]

    @property
    def boundary_count(self) -> int:
        return self.surface[1]

    def check_word(self, w: Word) -> Word:
        if w.max_generator() > self.generator_count:
            raise WordError(
                f"word uses generator {w.max_generator()} but presentation "
                f"has only {self.generator_count}")
        return w


def genus_block_word(block: int) -> Word:
    """Commutator product [x_{4b-3}, x_{4b-2}] [x_{4b-1}, x_{4b}] of one
    genus-2 block (1-based block index)."""
    j = 4 * (block - 1)
    return commutator(Word.gen(j + 1), Word.gen(j + 2)) * commutator(
        Word.gen(j + 3), Word.gen(j + 4))


def surface_relator(genus: int) -> Word:
    w = Word.identity()
    for i in range(1, genus + 1):
        w = w * commutator(Word.gen(2 * i - 1), Word.gen(2 * i))
    return w


def surface_presentation(genus: int, boundary_count: int) -> Presentation:
    """Standard presentation of the orientable surface of given genus with
    0 or 1 boundary circles."""
    if genus < 1:
        raise UnsupportedSurfaceError(f"genus must be >= 1, got {genus}")
    if boundary_count not in (0, 1):
        raise UnsupportedSurfaceError(
            f"only 0 or 1 boundary circles supported, got {boundary_count}")
    rel = surface_relator(genus)
    boundary: dict[str, Word] = {}
    if boundary_count == 1:
        boundary["boundary"] = rel
    if genus % 2 == 0:
        # Partial block products: S1_j separates the first j genus-2
        # blocks from the rest; S1_k is the full relator circle.
        k = genus // 2
        w = Word.identity()
        for j in range(1, k + 1):
            w = w * genus_block_word(j)
            boundary[f"S1_{j}"] = w
    relators = (rel,) if boundary_count == 0 else ()
    return Presentation(
        generator_count=2 * genus,
        relators=relators,
        boundary_words=boundary,
        surface=(genus, boundary_count),
    )


def fox_derivative(w: Word, k: int) -> GroupRing:
    """Left Fox derivative d w / d x_k in the integral group ring.

    Satisfies d(uv) = du + u dv, d x_k = 1, d x_j = 0 for j != k and
    d x_k^{-1} = -x_k^{-1}.
    """
    if k < 1:
        raise WordError(f"bad generator index {k}")
    out = GroupRing.zero()
    prefix = Word.identity()
    for i, e in w.reduced().letters:
        if i == k:
            if e == 1:
                out = out + GroupRing.of(prefix)
            else:
                out = out - GroupRing.of(prefix * Word.gen(i, -1))
        prefix = prefix * Word.gen(i, e)
    return out


def fox_boundary(w: Word, generator_count: int) -> list[GroupRing]:
    """All Fox derivatives (d w / d x_1, ..., d w / d x_n)."""
    return [fox_derivative(w, k) for k in range(1, generator_count + 1)]
