"""Word algebra for free groups of finite rank.

Letters are nonzero integers: ``k`` stands for the k-th generator and
``-k`` for its inverse.  In text, generators are written ``a..z`` (so
``a`` is generator 1) and a capital letter is the inverse of the
corresponding lowercase one: ``"aaB"`` is a^2 b^-1.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence, Tuple


class WordSyntaxError(ValueError):
    """Malformed word text; ``position`` is the offending index."""

    def __init__(self, message, position):
        super().__init__("%s (at position %d)" % (message, position))
        self.position = position


class RankExceededError(ValueError):
    """A letter refers to a generator beyond the ambient rank."""


class EmptyWordError(ValueError):
    """The identity element has no cyclically reduced representative."""


def letter_key(x):
    """Sort key realizing the fixed total order a < a^-1 < b < b^-1 < ...

    >>> sorted([2, -1, 1, -2], key=letter_key)
    [1, -1, 2, -2]
    """
    return (abs(x), 0 if x > 0 else 1)


def word_key(letters):
    return tuple(letter_key(x) for x in letters)


def letter_to_str(x):
    g = abs(x) - 1
    if not 0 <= g < 26:
        raise ValueError("no letter name for generator %d" % abs(x))
    return string.ascii_lowercase[g] if x > 0 else string.ascii_uppercase[g]


def letters_to_str(letters):
    return "".join(letter_to_str(x) for x in letters)


def inverse_letters(letters):
    return tuple(-x for x in reversed(letters))


def free_reduce(letters):
    """Cancel adjacent inverse pairs until none remain."""
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _check_letters(rank, letters):
    if rank < 1:
        raise ValueError("rank must be >= 1")
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a letter")
        if abs(x) > rank:
            raise RankExceededError(
                "generator %r exceeds rank %d" % (letter_to_str(x) if abs(x) <= 26 else abs(x), rank)
            )


@dataclass(frozen=True)
class Word:
    """A (not necessarily reduced) word in the rank-n free group."""

    rank: int
    letters: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        _check_letters(self.rank, self.letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return letters_to_str(self.letters) if self.letters else "<empty>"

    @property
    def is_reduced(self):
        return all(a != -b for a, b in zip(self.letters, self.letters[1:]))

    def reduced(self):
        return Word(self.rank, free_reduce(self.letters))

    def inverse(self):
        return Word(self.rank, inverse_letters(self.letters))

    def __mul__(self, other):
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        return Word(self.rank, self.letters + other.letters)


def _canonical_rotation(letters):
    key = word_key(letters)
    n = len(letters)
    best = 0
    for r in range(1, n):
        rotated = key[r:] + key[:r]
        if rotated < (key[best:] + key[:best]):
            best = r
    return letters[best:] + letters[:best]


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word, stored in its canonical rotation.

    The canonical rotation is the lexicographically least one under the
    letter order of :func:`letter_key`, so equal cyclic words compare equal.
    """

    rank: int
    letters: Tuple[int, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        if not letters:
            raise EmptyWordError("a cyclic word must be nonempty")
        _check_letters(self.rank, letters)
        n = len(letters)
        for i in range(n):
            if letters[i] == -letters[(i + 1) % n]:
                raise ValueError(
                    "not cyclically reduced: positions %d,%d cancel" % (i, (i + 1) % n)
                )
        object.__setattr__(self, "letters", _canonical_rotation(letters))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return letters_to_str(self.letters)

    def letter(self, i):
        return self.letters[i % len(self.letters)]

    def rotated(self, r):
        """The raw letter tuple rotated to start at position r (not canonicalized)."""
        r %= len(self.letters)
        return self.letters[r:] + self.letters[:r]

    def inverse(self):
        return CyclicWord(self.rank, inverse_letters(self.letters))

    def support(self):
        return frozenset(abs(x) for x in self.letters)

    def is_positive(self):
        return all(x > 0 for x in self.letters)


def parse_word(text, rank=None):
    """Parse word text into a literally expanded :class:`Word`.

    Grammar: ``word := term+ ; term := atom ("^" (int | atom))? ;
    atom := letter | "(" word ")"``.  An integer exponent repeats (or
    inverts) the atom literally; an atom exponent is right-conjugation,
    ``u^v = v^-1 u v``.  Whitespace is ignored.  With ``rank=None`` the
    rank is inferred as the largest generator mentioned.

    >>> parse_word("a^2 b^-1", 2).letters
    (1, 1, -2)
    >>> parse_word("(a^2)^b", 2).letters
    (-2, 1, 1, 2)
    """
    src = text
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(src) and src[pos].isspace():
            pos += 1

    def peek():
        skip_ws()
        return src[pos] if pos < len(src) else ""

    def parse_int():
        nonlocal pos
        skip_ws()
        start = pos
        if pos < len(src) and src[pos] in "+-":
            pos += 1
        digits = pos
        while pos < len(src) and src[pos].isdigit():
            pos += 1
        if pos == digits:
            raise WordSyntaxError("expected an integer exponent", start)
        value = int(src[start:pos])
        if value == 0:
            raise WordSyntaxError("exponent must be nonzero", start)
        return value

    def parse_atom():
        nonlocal pos
        skip_ws()
        if pos >= len(src):
            raise WordSyntaxError("unexpected end of input", pos)
        ch = src[pos]
        if ch == "(":
            open_pos = pos
            pos += 1
            inner = parse_expr()
            if peek() != ")":
                raise WordSyntaxError("unbalanced '('", open_pos)
            pos += 1
            return inner
        if ch in string.ascii_lowercase:
            pos += 1
            return [ord(ch) - ord("a") + 1]
        if ch in string.ascii_uppercase:
            pos += 1
            return [-(ord(ch) - ord("A") + 1)]
        raise WordSyntaxError("unexpected character %r" % ch, pos)

    def parse_term():
        nonlocal pos
        base = parse_atom()
        if peek() == "^":
            pos += 1
            skip_ws()
            if pos < len(src) and (src[pos].isdigit() or src[pos] in "+-"):
                e = parse_int()
                if e > 0:
                    return base * e
                return list(inverse_letters(base)) * (-e)
            conj = parse_atom()
            return list(inverse_letters(conj)) + base + conj
        return base

    def parse_expr():
        out = parse_term()
        while True:
            c = peek()
            if c == "" or c == ")":
                return out
            out += parse_term()

    letters = parse_expr()
    if pos < len(src):
        raise WordSyntaxError("trailing input", pos)
    if not letters:
        raise WordSyntaxError("empty word", 0)
    inferred = max(abs(x) for x in letters)
    if rank is None:
        rank = inferred
    return Word(rank, tuple(letters))


def cyclic_reduce(w):
    """Cyclically reduce a :class:`Word` (or re-canonicalize a CyclicWord).

    The result is conjugate to ``w`` in the free group.  Raises
    :class:`EmptyWordError` when ``w`` freely reduces to the identity.
    """
    if isinstance(w, CyclicWord):
        return w
    letters = list(free_reduce(w.letters))
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        letters = letters[1:-1]
    if not letters:
        raise EmptyWordError("word reduces to the identity")
    return CyclicWord(w.rank, tuple(letters))


def cyclic_word(text, rank=None):
    """Parse and cyclically reduce in one step."""
    return cyclic_reduce(parse_word(text, rank))


@dataclass(frozen=True)
class Syllables:
    """Maximal-run decomposition w = prod a_{k_i}^{p_i} with k_i != k_{i+1} cyclically."""

    rank: int
    parts: Tuple[Tuple[int, int], ...]  # (generator, exponent != 0)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(tuple(p) for p in self.parts))
        n = len(self.parts)
        for i, (g, e) in enumerate(self.parts):
            if e == 0 or not 1 <= g <= self.rank:
                raise ValueError("bad syllable %r" % ((g, e),))
            if n > 1 and g == self.parts[(i + 1) % n][0]:
                raise ValueError("adjacent syllables share generator %d" % g)

    def __len__(self):
        return len(self.parts)

    def expand(self):
        letters = []
        for g, e in self.parts:
            letters.extend([g if e > 0 else -g] * abs(e))
        return CyclicWord(self.rank, tuple(letters))


def syllable_decomposition(w):
    """Group the canonical-rotation letters into cyclic syllables.

    The canonical rotation always begins at a syllable boundary, so the
    returned parts align with positions in ``w.letters``.

    >>> syllable_decomposition(cyclic_word("a^2 b^-3")).parts
    ((1, 2), (2, -3))
    """
    parts = []
    for x in w.letters:
        if parts and abs(x) == parts[-1][0]:
            parts[-1][1] += 1 if x > 0 else -1
        else:
            parts.append([abs(x), 1 if x > 0 else -1])
    # The canonical rotation starts with the least letter, which is always a
    # syllable start; merging across the wrap could only occur for a
    # single-generator word, where everything collapses to one syllable.
    if len(parts) > 1 and parts[0][0] == parts[-1][0]:
        last = parts.pop()
        parts[0][1] += last[1]
    return Syllables(w.rank, tuple((g, e) for g, e in parts))


def syllable_starts(w):
    """Start position of each syllable of ``w`` in canonical coordinates."""
    syl = syllable_decomposition(w)
    starts = []
    pos = 0
    for g, e in syl.parts:
        starts.append(pos)
        pos += abs(e)
    return syl, tuple(starts)


def primitive_root(w):
    """Maximal decomposition w = root^power as cyclic words.

    >>> primitive_root(cyclic_word("abab ab"))
    (CyclicWord(rank=2, letters=(1, 2)), 3)
    """
    letters = w.letters
    n = len(letters)
    for d in range(1, n + 1):
        if n % d:
            continue
        if letters[d:] + letters[:d] == letters:
            return CyclicWord(w.rank, letters[:d]), n // d
    raise AssertionError("unreachable: every word has period |w|")


def is_proper_power(w):
    return primitive_root(w)[1] > 1


@dataclass(frozen=True)
class Relabeling:
    """A polygonality-preserving word transform.

    ``perm`` maps generator i to generator perm[i-1]; ``invert`` lists the
    generators whose orientation flips; ``invert_word`` reverses the word;
    ``rotation`` rotates the starting point (a no-op on canonical cyclic
    words, kept so transforms can be recorded verbatim).
    """

    perm: Tuple[int, ...] | None = None
    invert: frozenset = frozenset()
    invert_word: bool = False
    rotation: int = 0

    def __post_init__(self):
        object.__setattr__(self, "invert", frozenset(self.invert))
        if self.perm is not None:
            object.__setattr__(self, "perm", tuple(self.perm))
            if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
                raise ValueError("perm must be a permutation of 1..n")

    def apply_letter(self, x):
        g, s = abs(x), 1 if x > 0 else -1
        if self.perm is not None:
            if g > len(self.perm):
                raise ValueError("perm does not cover generator %d" % g)
            g = self.perm[g - 1]
        if abs(x) in self.invert:
            s = -s
        return s * g

    def apply_letters(self, letters):
        out = tuple(self.apply_letter(x) for x in letters)
        if self.invert_word:
            out = inverse_letters(out)
        if self.rotation:
            r = self.rotation % len(out)
            out = out[r:] + out[:r]
        return out


def transform(w, relabeling):
    """Apply a :class:`Relabeling` and re-canonicalize.

    >>> str(transform(cyclic_word("aab"), Relabeling(invert=frozenset({1}))))
    'AAb'
    """
    return CyclicWord(w.rank, relabeling.apply_letters(w.letters))


def rotation_offset(layout, canonical):
    """Least o with canonical[u] == layout[(u+o) % n] for all u, or None."""
    n = len(layout)
    if n != len(canonical):
        return None
    for o in range(n):
        if all(canonical[u] == layout[(u + o) % n] for u in range(n)):
            return o
    return None
