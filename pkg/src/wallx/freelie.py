"""Free graded Lie algebra on class symbols.

Words are tuples of letters from a declared alphabet; Lyndon words (ordered by
length, then lexicographically in declaration order) index the Lie basis, and
their standard bracketings expand into the tensor algebra.  The module
provides the expansion homomorphism, its one-sided inverse on primitive
elements (the Dynkin projection, with a round-trip soundness check), exp(ad)
conjugation checks in the truncated enveloping algebra, and the total-term
vanishing sum for a pair of commuting markers.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Hashable, Mapping, NamedTuple, Sequence

from .errors import BracketNonzero, NotPrimitive

Word = tuple


class ClassSymbol(NamedTuple):
    """A class symbol: a display label paired with its monoid degree."""

    label: str
    degree: tuple


class LieContext:
    """An ordered alphabet, with at most one declared commuting pair.

    Letters are arbitrary hashables, ordered by declaration.  If ``commuting``
    names a pair (a, b), the algebra is the quotient by [a, b] = 0; words are
    then normalized by the confluent rewrite  b·a → a·b  and the Lyndon-basis
    operations are unavailable.
    """

    __slots__ = ("letters", "index", "commuting", "_expansions")

    def __init__(self, letters: Sequence[Hashable], commuting=None):
        letters = tuple(letters)
        index = {}
        for i, letter in enumerate(letters):
            if letter in index:
                raise ValueError(f"duplicate letter {letter!r}")
            index[letter] = i
        if commuting is not None:
            a, b = commuting
            if a not in index or b not in index or a == b:
                raise ValueError("commuting pair must be two distinct letters")
            if index[a] > index[b]:
                a, b = b, a
            commuting = (a, b)
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "commuting", commuting)
        object.__setattr__(self, "_expansions", {})

    def __setattr__(self, name, value):
        raise AttributeError("LieContext is immutable")

    def key(self, word: Word) -> tuple[int, ...]:
        return tuple(self.index[letter] for letter in word)

    def normalize(self, word: Word) -> Word:
        """Canonical form of a word under the single commuting-pair rewrite."""
        if self.commuting is None:
            return tuple(word)
        a, b = self.commuting
        out = list(word)
        changed = True
        while changed:
            changed = False
            for i in range(len(out) - 1):
                if out[i] == b and out[i + 1] == a:
                    out[i], out[i + 1] = a, b
                    changed = True
        return tuple(out)

    def require_free(self, what: str) -> None:
        if self.commuting is not None:
            raise ValueError(f"{what} needs a free context (no commuting pair)")


# -- Lyndon words ----------------------------------------------------------------


def _duval(size: int, max_length: int):
    """All Lyndon index-words of length ≤ max_length, in lexicographic order."""
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        pattern = len(w)
        while len(w) < max_length:
            w.append(w[len(w) - pattern])
        while w and w[-1] == size - 1:
            w.pop()


def lyndon_words(alphabet: Sequence[Hashable], max_length: int) -> list[Word]:
    """All Lyndon words up to the given length, ordered by length then lex."""
    alphabet = tuple(alphabet)
    if len(set(alphabet)) != len(alphabet):
        raise ValueError("alphabet letters must be distinct")
    index = {letter: i for i, letter in enumerate(alphabet)}
    words = [
        tuple(alphabet[i] for i in iw)
        for iw in _duval(len(alphabet), max_length)
    ]
    words.sort(key=lambda w: (len(w), tuple(index[l] for l in w)))
    return words


def _is_lyndon(word: Word, ctx: LieContext) -> bool:
    k = ctx.key(word)
    return len(word) > 0 and all(k < k[i:] for i in range(1, len(word)))


def _standard_split(word: Word, ctx: LieContext) -> tuple[Word, Word]:
    """Standard factorization of a Lyndon word: split before the
    lexicographically least proper suffix."""
    k = ctx.key(word)
    cut = min(range(1, len(word)), key=lambda i: k[i:])
    return word[:cut], word[cut:]


# -- enveloping-algebra elements ---------------------------------------------------


def _same_context(a, b) -> None:
    if a.context is not b.context:
        raise ValueError("elements live in different contexts")


class UEAElement:
    """Finitely supported word-to-coefficient map in the tensor algebra."""

    __slots__ = ("context", "terms")

    def __init__(self, context: LieContext, terms: Mapping[Word, object] | None = None):
        clean: dict[Word, object] = {}
        if terms:
            for word, coeff in terms.items():
                if not coeff:
                    continue
                word = context.normalize(word)
                acc = clean.get(word)
                acc = coeff if acc is None else acc + coeff
                if acc:
                    clean[word] = acc
                elif word in clean:
                    del clean[word]
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("UEAElement is immutable")

    @classmethod
    def zero(cls, context: LieContext) -> "UEAElement":
        return cls(context)

    @classmethod
    def unit(cls, context: LieContext, coeff=Fraction(1)) -> "UEAElement":
        return cls(context, {(): coeff})

    @classmethod
    def letter(cls, context: LieContext, letter, coeff=Fraction(1)) -> "UEAElement":
        if letter not in context.index:
            raise ValueError(f"unknown letter {letter!r}")
        return cls(context, {(letter,): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "UEAElement") -> "UEAElement":
        if not isinstance(other, UEAElement):
            return NotImplemented
        _same_context(self, other)
        out = dict(self.terms)
        for word, coeff in other.terms.items():
            acc = out.get(word)
            acc = coeff if acc is None else acc + coeff
            if acc:
                out[word] = acc
            elif word in out:
                del out[word]
        return UEAElement(self.context, out)

    def __neg__(self) -> "UEAElement":
        return UEAElement(self.context, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "UEAElement") -> "UEAElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, UEAElement):
            _same_context(self, other)
            return self._product(other, None)
        if isinstance(other, LieElement):
            return NotImplemented
        return UEAElement(
            self.context, {w: c * other for w, c in self.terms.items()}
        )

    def __rmul__(self, other):
        if isinstance(other, (UEAElement, LieElement)):
            return NotImplemented
        return UEAElement(
            self.context, {w: other * c for w, c in self.terms.items()}
        )

    def _product(self, other: "UEAElement", maxlen: int | None) -> "UEAElement":
        out: dict[Word, object] = {}
        ctx = self.context
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                if maxlen is not None and len(w1) + len(w2) > maxlen:
                    continue
                word = ctx.normalize(w1 + w2)
                coeff = c1 * c2
                acc = out.get(word)
                acc = coeff if acc is None else acc + coeff
                if acc:
                    out[word] = acc
                elif word in out:
                    del out[word]
        return UEAElement(ctx, out)

    def bracket(self, other: "UEAElement") -> "UEAElement":
        return self * other - other * self

    def truncated(self, maxlen: int) -> "UEAElement":
        return UEAElement(
            self.context,
            {w: c for w, c in self.terms.items() if len(w) <= maxlen},
        )

    def word_lengths(self) -> set[int]:
        return {len(w) for w in self.terms}

    def __eq__(self, other) -> bool:
        if not isinstance(other, UEAElement):
            return NotImplemented
        return self.context is other.context and self.terms == other.terms

    __hash__ = None

    def __repr__(self) -> str:
        if not self.terms:
            return "UEAElement(0)"
        ctx = self.context
        bits = [
            f"{coeff}*{'.'.join(map(str, word)) or '1'}"
            for word, coeff in sorted(
                self.terms.items(), key=lambda item: (len(item[0]), ctx.key(item[0]))
            )
        ]
        return "UEAElement(" + " + ".join(bits) + ")"


class LieElement:
    """Finitely supported Lyndon-word-to-coefficient map."""

    __slots__ = ("context", "terms")

    def __init__(self, context: LieContext, terms: Mapping[Word, object] | None = None):
        context.require_free("LieElement")
        clean: dict[Word, object] = {}
        if terms:
            for word, coeff in terms.items():
                word = tuple(word)
                if not _is_lyndon(word, context):
                    raise ValueError(f"{word!r} is not a Lyndon word")
                if coeff:
                    clean[word] = coeff
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LieElement is immutable")

    @classmethod
    def zero(cls, context: LieContext) -> "LieElement":
        return cls(context)

    @classmethod
    def letter(cls, context: LieContext, letter, coeff=Fraction(1)) -> "LieElement":
        if letter not in context.index:
            raise ValueError(f"unknown letter {letter!r}")
        return cls(context, {(letter,): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LieElement") -> "LieElement":
        if not isinstance(other, LieElement):
            return NotImplemented
        _same_context(self, other)
        out = dict(self.terms)
        for word, coeff in other.terms.items():
            acc = out.get(word)
            acc = coeff if acc is None else acc + coeff
            if acc:
                out[word] = acc
            elif word in out:
                del out[word]
        return LieElement(self.context, out)

    def __neg__(self) -> "LieElement":
        return LieElement(self.context, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (LieElement, UEAElement)):
            return NotImplemented
        return LieElement(self.context, {w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, (LieElement, UEAElement)):
            return NotImplemented
        return LieElement(self.context, {w: other * c for w, c in self.terms.items()})

    def bracket(self, other: "LieElement") -> "LieElement":
        _same_context(self, other)
        return uea_to_lie(expand_to_uea(self).bracket(expand_to_uea(other)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.context is other.context and self.terms == other.terms

    __hash__ = None

    def __repr__(self) -> str:
        if not self.terms:
            return "LieElement(0)"
        ctx = self.context
        bits = [
            f"{coeff}*b({'.'.join(map(str, word))})"
            for word, coeff in sorted(
                self.terms.items(), key=lambda item: (len(item[0]), ctx.key(item[0]))
            )
        ]
        return "LieElement(" + " + ".join(bits) + ")"


# -- expansion and projection ------------------------------------------------------


def _expand_lyndon(word: Word, ctx: LieContext) -> dict[Word, Fraction]:
    """Tensor-algebra expansion of the standard bracketing of a Lyndon word."""
    hit = ctx._expansions.get(word)
    if hit is not None:
        return hit
    if len(word) == 1:
        out = {word: Fraction(1)}
    else:
        left, right = _standard_split(word, ctx)
        a = _expand_lyndon(left, ctx)
        b = _expand_lyndon(right, ctx)
        out = {}
        for w1, c1 in a.items():
            for w2, c2 in b.items():
                for w, c in ((w1 + w2, c1 * c2), (w2 + w1, -c1 * c2)):
                    acc = out.get(w, Fraction(0)) + c
                    if acc:
                        out[w] = acc
                    elif w in out:
                        del out[w]
    ctx._expansions[word] = out
    return out


def expand_to_uea(x: LieElement) -> UEAElement:
    """Expand every basis bracketing via [f, g] = fg - gf."""
    ctx = x.context
    out: dict[Word, object] = {}
    for word, coeff in x.terms.items():
        for w, c in _expand_lyndon(word, ctx).items():
            acc = out.get(w)
            add = coeff * c
            acc = add if acc is None else acc + add
            if acc:
                out[w] = acc
            elif w in out:
                del out[w]
    return UEAElement(ctx, out)


def uea_to_lie(p: UEAElement) -> LieElement:
    """Rewrite a Lie-subspace element in the Lyndon basis.

    Uses the triangularity of the expansion: the expansion of a Lyndon word's
    bracketing is that word plus lexicographically larger words of the same
    length.  Raises NotPrimitive if the input is not in the Lie subspace.
    """
    ctx = p.context
    ctx.require_free("uea_to_lie")
    rem = dict(p.terms)
    out: dict[Word, object] = {}
    while rem:
        word = min(rem, key=lambda w: (len(w), ctx.key(w)))
        if not _is_lyndon(word, ctx):
            raise NotPrimitive(f"leading word {word!r} is not Lyndon")
        coeff = rem.pop(word)
        out[word] = coeff
        for w, c in _expand_lyndon(word, ctx).items():
            if w == word:
                continue
            acc = rem.get(w)
            sub = coeff * c
            acc = -sub if acc is None else acc - sub
            if acc:
                rem[w] = acc
            elif w in rem:
                del rem[w]
    return LieElement(ctx, out)


def left_nested(word: Word, ctx: LieContext) -> LieElement:
    """The left-nested bracketing [[..[w1, w2], w3], .., wn] as a Lie element."""
    acc = LieElement.letter(ctx, word[0])
    for letter in word[1:]:
        acc = acc.bracket(LieElement.letter(ctx, letter))
    return acc


def dynkin_project(p: UEAElement, n: int) -> LieElement:
    """Recover the Lie element with expansion ``p`` (homogeneous of length n).

    Computes (1/n)·Σ_w p[w]·leftNestedBracket(w) and verifies the round trip
    expand_to_uea(result) == p, raising NotPrimitive on failure.
    """
    ctx = p.context
    ctx.require_free("dynkin_project")
    if p.is_zero():
        return LieElement.zero(ctx)
    if p.word_lengths() != {n}:
        raise ValueError(f"input is not homogeneous of word length {n}")
    acc = LieElement.zero(ctx)
    for word, coeff in p.terms.items():
        acc = acc + left_nested(word, ctx) * (coeff * Fraction(1, n))
    if expand_to_uea(acc) != p:
        raise NotPrimitive(f"round trip failed on a length-{n} element")
    return acc


def evaluate_lie(x: LieElement, leaf, bracket, zero, scale=None):
    """Fold a Lie element into any Lie algebra.

    ``leaf`` maps letters to target values, ``bracket`` is the target bracket,
    and ``zero`` is the target zero.  Coefficients act through ``scale``
    (default: left multiplication).
    """
    ctx = x.context
    if scale is None:
        scale = lambda coeff, value: coeff * value

    def build(word: Word):
        if len(word) == 1:
            return leaf(word[0])
        left, right = _standard_split(word, ctx)
        return bracket(build(left), build(right))

    acc = zero
    for word in sorted(x.terms, key=lambda w: (len(w), ctx.key(w))):
        acc = acc + scale(x.terms[word], build(word))
    return acc


# -- exp(ad) conjugation check ------------------------------------------------------


def _exp_truncated(x: UEAElement, order: int) -> UEAElement:
    if () in x.terms:
        raise ValueError("series exponential needs no constant term")
    acc = UEAElement.unit(x.context)
    term = acc
    k = 0
    while not term.is_zero():
        k += 1
        term = term._product(x, order) * Fraction(1, k)
        acc = acc + term
    return acc


def exp_ad_check(x: LieElement, y: LieElement, order: int) -> bool:
    """Verify e^{ad_x} y = e^x y e^{-x} in the length-truncated tensor algebra."""
    xe = expand_to_uea(x)
    ye = expand_to_uea(y)
    lhs = UEAElement.zero(x.context)
    term = ye
    k = 0
    while not term.is_zero():
        lhs = lhs + term
        k += 1
        term = (xe._product(term, order) - term._product(xe, order)) * Fraction(1, k)
    ex = _exp_truncated(xe, order)
    exm = _exp_truncated(-xe, order)
    rhs = ex._product(ye, order)._product(exm, order)
    return lhs.truncated(order) == rhs.truncated(order)


# -- the total-term vanishing sum ----------------------------------------------------


def _as_uea(ctx: LieContext, value) -> UEAElement:
    if isinstance(value, UEAElement):
        _same_context_pair(ctx, value)
        return value
    if isinstance(value, LieElement):
        _same_context_pair(ctx, value)
        return expand_to_uea(value)
    return UEAElement.letter(ctx, value)


def _same_context_pair(ctx: LieContext, el) -> None:
    if el.context is not ctx:
        raise ValueError("elements live in different contexts")


def _vec_sub(a: tuple, b: tuple) -> tuple | None:
    if len(a) != len(b):
        raise ValueError("degree tuples of different lengths")
    out = tuple(x - y for x, y in zip(a, b))
    return out if all(c >= 0 for c in out) else None


def ordered_degree_decompositions(
    target: tuple, support: Sequence[tuple], min_parts: int = 2
) -> list[tuple]:
    """Ordered tuples over ``support`` (repetition allowed) summing to target."""
    for part in support:
        if not all(c >= 0 for c in part) or not any(part):
            raise ValueError("support classes must be nonzero and nonnegative")
    out: list[tuple] = []

    def rec(rem: tuple, prefix: tuple) -> None:
        if not any(rem):
            if len(prefix) >= min_parts:
                out.append(prefix)
            return
        for part in support:
            nxt = _vec_sub(rem, part)
            if nxt is not None:
                rec(nxt, prefix + (part,))

    rec(target, ())
    return out


def total_term_sum(
    z_table: Mapping[tuple, object], delta1, delta2, target: tuple
) -> UEAElement:
    """Σ over ordered decompositions of ``target`` (n ≥ 2) of the two-marker
    nested-bracket sum

        C(α⃗) = Σ_{m=0}^n [ (1/m!)[z_{α_m},[..[z_{α_1},δ₁]..]],
                            (1/(n-m)!)[z_{α_n},[..[z_{α_{m+1}},δ₂]..]] ].

    The markers must commute; otherwise BracketNonzero is raised.  The result
    is returned in its enveloping-algebra expansion (the vanishing statement
    is an identity of Lie elements).
    """
    ctx = None
    for candidate in itertools.chain(z_table.values(), (delta1, delta2)):
        if isinstance(candidate, (UEAElement, LieElement)):
            ctx = candidate.context
            break
    if ctx is None:
        raise ValueError("no Lie or enveloping element to take a context from")
    d1 = _as_uea(ctx, delta1)
    d2 = _as_uea(ctx, delta2)
    if not d1.bracket(d2).is_zero():
        raise BracketNonzero("the two markers do not commute")
    values = {}
    for deg, v in z_table.items():
        el = _as_uea(ctx, v)
        if not el.is_zero():
            values[deg] = el
    support = sorted(values)
    acc = UEAElement.zero(ctx)
    for parts in ordered_degree_decompositions(target, support, 2):
        n = len(parts)
        for m in range(n + 1):
            left = d1
            for beta in parts[:m]:
                left = values[beta].bracket(left)
            right = d2
            for beta in parts[m:]:
                right = values[beta].bracket(right)
            acc = acc + left.bracket(right) * Fraction(
                1, math.factorial(m) * math.factorial(n - m)
            )
    return acc
