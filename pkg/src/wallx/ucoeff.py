"""Effective-class monoids, weak stability data, and the universal
coefficients S, U, and their bracket-canonical companion.

Classes are integer vectors; the effective cone consists of the nonzero
natural-number combinations of a declared generator list, each generator
carrying positive total mass so that every enumeration below terminates.
The S and U coefficients are computed directly from their defining sums over
index conditions and permissible double groupings; the bracket-side
coefficients come from the length-graded Dynkin projection of the U-side
word sum.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    DecompositionOverflow,
    MissingChi,
    MissingFr,
    SlopeUndefined,
)
from .freelie import LieContext, LieElement, UEAElement, dynkin_project
from .ring import SlopeValue

ClassVec = tuple


def as_class(cls) -> ClassVec:
    out = tuple(int(c) for c in cls)
    if not out:
        raise ValueError("class vectors must have at least one coordinate")
    return out


def class_sum(classes: Iterable[ClassVec]) -> ClassVec:
    classes = [as_class(c) for c in classes]
    if not classes:
        raise ValueError("empty class sum")
    dim = len(classes[0])
    if any(len(c) != dim for c in classes):
        raise ValueError("class vectors of mixed dimension")
    return tuple(sum(col) for col in zip(*classes))


def _mass(cls: ClassVec) -> int:
    return sum(cls)


class EffectiveMonoid:
    """The cone of nonzero natural-number combinations of the generators."""

    __slots__ = ("generators", "dim", "_member_cache")

    def __init__(self, generators: Iterable[ClassVec]):
        gens = tuple(as_class(g) for g in generators)
        if not gens:
            raise ValueError("at least one generator is required")
        dim = len(gens[0])
        for g in gens:
            if len(g) != dim:
                raise ValueError("generators of mixed dimension")
            if _mass(g) <= 0:
                raise ValueError(
                    f"generator {g} must have positive total mass"
                )
        if len(set(gens)) != len(gens):
            raise ValueError("duplicate generators")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_member_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("EffectiveMonoid is immutable")

    def contains(self, cls) -> bool:
        """Whether ``cls`` is a nonzero natural combination of generators."""
        cls = as_class(cls)
        if len(cls) != self.dim:
            raise ValueError("class dimension does not match the monoid")
        if not any(cls):
            return False
        return self._reachable(cls)

    def _reachable(self, cls: ClassVec) -> bool:
        if not any(cls):
            return True
        hit = self._member_cache.get(cls)
        if hit is not None:
            return hit
        out = False
        if _mass(cls) > 0:
            for g in self.generators:
                rest = tuple(c - gc for c, gc in zip(cls, g))
                if self._reachable(rest):
                    out = True
                    break
        self._member_cache[cls] = out
        return out

    def effective_upto(self, mass_cap: int) -> list[ClassVec]:
        """All effective classes of total mass at most ``mass_cap``."""
        found: set[ClassVec] = set()
        frontier = [g for g in self.generators if _mass(g) <= mass_cap]
        while frontier:
            fresh = []
            for cls in frontier:
                if cls in found:
                    continue
                found.add(cls)
                for g in self.generators:
                    bigger = tuple(c + gc for c, gc in zip(cls, g))
                    if _mass(bigger) <= mass_cap and bigger not in found:
                        fresh.append(bigger)
            frontier = fresh
        return sorted(found)

    def decompositions(
        self, target, max_parts: int = 8, min_parts: int = 1
    ) -> list[tuple[ClassVec, ...]]:
        """Ordered splittings of ``target`` into effective classes.

        Raises DecompositionOverflow if some splitting would need more than
        ``max_parts`` parts; splittings are never silently truncated.
        """
        target = as_class(target)
        if len(target) != self.dim:
            raise ValueError("class dimension does not match the monoid")
        if not self.contains(target):
            return []
        candidates = self.effective_upto(_mass(target))
        out: list[tuple[ClassVec, ...]] = []

        def rec(rem: ClassVec, prefix: tuple) -> None:
            if not any(rem):
                if len(prefix) >= min_parts:
                    out.append(prefix)
                return
            if not self._reachable(rem):
                return
            if len(prefix) >= max_parts:
                raise DecompositionOverflow(
                    f"{target} needs more than {max_parts} parts"
                )
            for part in candidates:
                rest = tuple(c - pc for c, pc in zip(rem, part))
                if _mass(rest) >= 0 and self._reachable(rest):
                    rec(rest, prefix + (part,))

        rec(target, ())
        return out


def _to_slope(value) -> SlopeValue:
    if isinstance(value, SlopeValue):
        return value
    if isinstance(value, (tuple, list)):
        return SlopeValue.of(*value)
    return SlopeValue.of(value)


class StabilityData:
    """Weak stability data: a slope assignment plus optional numerical data.

    ``slope`` is either a mapping from class vectors to slope values or a
    callable computing them; lookups that fail raise SlopeUndefined.  The
    optional ``chi`` (an antisymmetric integer matrix or a callable) and
    ``fr`` (a mapping or callable) feed the downstream wall-crossing
    operations.
    """

    __slots__ = ("_slope", "_rank", "_chi", "_fr", "name")

    def __init__(self, slope, *, rank=None, chi=None, fr=None, name="tau"):
        object.__setattr__(self, "_slope", slope)
        object.__setattr__(self, "_rank", rank)
        if chi is not None and not callable(chi):
            chi = _chi_from_matrix(chi)
        object.__setattr__(self, "_chi", chi)
        object.__setattr__(self, "_fr", fr)
        object.__setattr__(self, "name", name)

    def __setattr__(self, name, value):
        raise AttributeError("StabilityData is immutable")

    def slope_of(self, cls) -> SlopeValue:
        cls = as_class(cls)
        source = self._slope
        if callable(source):
            value = source(cls)
        else:
            try:
                value = source[cls]
            except KeyError:
                raise SlopeUndefined(f"no slope for class {cls}") from None
        if value is None:
            raise SlopeUndefined(f"no slope for class {cls}")
        return _to_slope(value)

    def rank_of(self, cls) -> int:
        cls = as_class(cls)
        source = self._rank
        if source is None:
            raise ValueError(f"{self.name} carries no rank function")
        return int(source(cls) if callable(source) else source[cls])

    def chi(self, a, b) -> int:
        if self._chi is None:
            raise MissingChi(f"{self.name} carries no pairing form")
        return int(self._chi(as_class(a), as_class(b)))

    def fr(self, cls) -> int:
        cls = as_class(cls)
        source = self._fr
        if source is None:
            raise MissingFr(f"{self.name} carries no fr values")
        if callable(source):
            return int(source(cls))
        try:
            return int(source[cls])
        except KeyError:
            raise MissingFr(f"no fr value for class {cls}") from None

    def has_chi(self) -> bool:
        return self._chi is not None

    def see_saw_holds(self, monoid: EffectiveMonoid, target, max_parts: int = 8) -> bool:
        """Check the weak see-saw property over two-part splittings of target."""
        target = as_class(target)
        mid = self.slope_of(target)
        for parts in monoid.decompositions(target, max_parts=max_parts, min_parts=2):
            if len(parts) != 2:
                continue
            left = self.slope_of(parts[0])
            right = self.slope_of(parts[1])
            if not (left >= mid >= right or left <= mid <= right):
                return False
        return True


def _chi_from_matrix(matrix):
    rows = tuple(tuple(int(x) for x in row) for row in matrix)
    size = len(rows)
    for i, row in enumerate(rows):
        if len(row) != size:
            raise ValueError("pairing matrix must be square")
        for j in range(size):
            if rows[i][j] != -rows[j][i]:
                raise ValueError("pairing matrix must be antisymmetric")

    def chi(a: ClassVec, b: ClassVec) -> int:
        if len(a) != size or len(b) != size:
            raise ValueError("class dimension does not match the pairing matrix")
        return sum(a[i] * rows[i][j] * b[j] for i in range(size) for j in range(size))

    return chi


def linear_stability(a: Sequence[int], b: Sequence[int], **extra) -> StabilityData:
    """Slope (a·γ)/(b·γ), with the usual ±infinity convention when b·γ = 0."""
    a = tuple(Fraction(x) for x in a)
    b = tuple(Fraction(x) for x in b)

    def slope(cls: ClassVec) -> SlopeValue:
        if len(cls) != len(a):
            raise ValueError("class dimension does not match the slope data")
        num = sum(x * c for x, c in zip(a, cls))
        den = sum(x * c for x, c in zip(b, cls))
        if den == 0:
            if num > 0:
                return SlopeValue.of("inf")
            if num < 0:
                return SlopeValue.of("-inf")
            raise SlopeUndefined(f"0/0 slope for class {cls}")
        return SlopeValue.of(num / den)

    return StabilityData(slope, **extra)


# -- universal coefficients ---------------------------------------------------------


def compositions(n: int):
    """Ordered tuples of positive integers summing to n."""
    for k in range(n):
        for cuts in itertools.combinations(range(1, n), k):
            bounds = (0,) + cuts + (n,)
            yield tuple(bounds[i + 1] - bounds[i] for i in range(len(bounds) - 1))


def double_groupings(n: int):
    """All double groupings of n letters as (outer block sizes over letters,
    inner block sizes over outer blocks)."""
    for first in compositions(n):
        for second in compositions(len(first)):
            yield first, second


def S_coeff(classes: Sequence, tau: StabilityData, tau_prime: StabilityData) -> Fraction:
    """The sign coefficient of an ordered tuple of effective classes.

    Each adjacent index must either (a) not descend for the first stability
    while the partial sums descend strictly for the second, or (b) descend
    strictly for the first while the partial sums do not descend for the
    second; the value is (-1)^{#(a)}, and 0 if some index fails both.
    """
    classes = [as_class(c) for c in classes]
    n = len(classes)
    if n == 0:
        raise ValueError("need at least one class")
    r = 0
    for i in range(1, n):
        first_here = tau.slope_of(classes[i - 1])
        first_next = tau.slope_of(classes[i])
        second_left = tau_prime.slope_of(class_sum(classes[:i]))
        second_right = tau_prime.slope_of(class_sum(classes[i:]))
        if first_here <= first_next and second_left > second_right:
            r += 1
        elif first_here > first_next and second_left <= second_right:
            pass
        else:
            return Fraction(0)
    return Fraction(1) if r % 2 == 0 else Fraction(-1)


def U_coeff(classes: Sequence, tau: StabilityData, tau_prime: StabilityData) -> Fraction:
    """Sum over permissible double groupings of the weighted S products."""
    classes = [as_class(c) for c in classes]
    n = len(classes)
    if n == 0:
        raise ValueError("need at least one class")
    total_slope = tau_prime.slope_of(class_sum(classes))
    acc = Fraction(0)
    for first in compositions(n):
        bounds = [0]
        for size in first:
            bounds.append(bounds[-1] + size)
        blocks = [classes[bounds[i] : bounds[i + 1]] for i in range(len(first))]
        betas = [class_sum(block) for block in blocks]
        if not all(
            tau.slope_of(beta) == tau.slope_of(member)
            for beta, block in zip(betas, blocks)
            for member in block
        ):
            continue
        first_weight = Fraction(1)
        for size in first:
            first_weight /= math.factorial(size)
        m = len(betas)
        for second in compositions(m):
            inner = [0]
            for size in second:
                inner.append(inner[-1] + size)
            beta_blocks = [betas[inner[j] : inner[j + 1]] for j in range(len(second))]
            if any(
                tau_prime.slope_of(class_sum(group)) != total_slope
                for group in beta_blocks
            ):
                continue
            l = len(second)
            term = Fraction(-1 if l % 2 == 0 else 1, l) * first_weight
            for group in beta_blocks:
                term *= S_coeff(group, tau, tau_prime)
                if not term:
                    break
            acc += term
    return acc


def Utilde(classes: Sequence, tau: StabilityData, tau_prime: StabilityData) -> Fraction:
    """Bracket-canonical coordinate of an ordered tuple: U divided by the
    number of parts (the left-nested coefficient produced by the Dynkin
    projection of the word sum)."""
    classes = [as_class(c) for c in classes]
    return U_coeff(classes, tau, tau_prime) / len(classes)


def utilde_word_sum(
    alpha,
    tau: StabilityData,
    tau_prime: StabilityData,
    monoid: EffectiveMonoid,
    *,
    max_parts: int = 8,
    context: LieContext | None = None,
) -> UEAElement:
    """The word-side sum Σ U(α₁,…,α_n)·ε(α₁)⋯ε(α_n) over all splittings."""
    alpha = as_class(alpha)
    coeffs: dict[tuple, Fraction] = {}
    for parts in monoid.decompositions(alpha, max_parts=max_parts):
        value = U_coeff(parts, tau, tau_prime)
        if value:
            coeffs[parts] = value
    if context is None:
        letters = sorted({cls for parts in coeffs for cls in parts})
        context = LieContext(letters)
    return UEAElement(context, coeffs)


def utilde_lie_element(
    alpha,
    tau: StabilityData,
    tau_prime: StabilityData,
    monoid: EffectiveMonoid,
    *,
    max_parts: int = 8,
    context: LieContext | None = None,
) -> LieElement:
    """The unique Lie element whose expansion is the U-side word sum.

    Computed length by length through the Dynkin projection; NotPrimitive
    propagates when the word sum fails to be primitive (inconsistent
    stability data).
    """
    words = utilde_word_sum(
        alpha, tau, tau_prime, monoid, max_parts=max_parts, context=context
    )
    context = words.context
    result = LieElement.zero(context)
    for n in sorted(words.word_lengths()):
        piece = UEAElement(
            context, {w: c for w, c in words.terms.items() if len(w) == n}
        )
        result = result + dynkin_project(piece, n)
    return result


# -- composition sums ---------------------------------------------------------------


def c_n(n: int) -> Fraction:
    """Σ over compositions of n of (-1)^{#blocks}·Π 1/(block size)!."""
    if n < 1:
        raise ValueError("n must be positive")
    acc = Fraction(0)
    for comp in compositions(n):
        term = Fraction(-1 if len(comp) % 2 == 1 else 1)
        for size in comp:
            term /= math.factorial(size)
        acc += term
    return acc


def set_partitions(items: Sequence):
    """All partitions of ``items`` into nonempty unordered blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def mu_n(n: int) -> Fraction:
    """Σ over set partitions of {1..n} of Π (-1)^{|B|-1}(|B|-1)!."""
    if n < 1:
        raise ValueError("n must be positive")
    acc = Fraction(0)
    for part in set_partitions(range(n)):
        term = Fraction(1)
        for block in part:
            size = len(block)
            term *= Fraction(
                math.factorial(size - 1) * (1 if size % 2 == 1 else -1)
            )
        acc += term
    return acc
