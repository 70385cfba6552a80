"""Exact arithmetic backbone.

Sparse multivariate Laurent polynomials over the rationals, with optional
half-integer exponents (stored internally as doubled integers so that
symmetrized weights such as ``k^(1/2)`` stay exact), optional series
truncation, rational elements (quotients of Laurent polynomials), series
expansion at 0/infinity, residue extraction, series exponential/logarithm,
and specialization at ``k = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import (
    NonExpandable,
    NonRational,
    NonzeroConstantTerm,
    PoleAtOne,
)

Scalar = Union[int, Fraction]

#: A monomial: sorted tuple of (variable name, doubled integer exponent).
Mono = tuple[tuple[str, int], ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _frac(x: Scalar) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _exp2(e: Scalar) -> int:
    """Convert a natural exponent (integer or half-integer) to doubled form."""
    d = _frac(e) * 2
    if d.denominator != 1:
        raise ValueError(f"exponent {e} is not a half-integer")
    return int(d)


def _mono(entries: Mapping[str, int] | Iterable[tuple[str, int]]) -> Mono:
    items = entries.items() if isinstance(entries, Mapping) else entries
    return tuple(sorted((v, int(e)) for v, e in items if e))


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    acc: dict[str, int] = dict(a)
    for v, e in b:
        n = acc.get(v, 0) + e
        if n:
            acc[v] = n
        else:
            del acc[v]
    return tuple(sorted(acc.items()))


def _mono_pow(m: Mono, k: int) -> Mono:
    if k == 0:
        return ()
    return tuple((v, e * k) for v, e in m)


def _mono_deg2(m: Mono, names: frozenset[str]) -> int:
    return sum(e for v, e in m if v in names)


@dataclass(frozen=True)
class Trunc:
    """Series truncation: a bound on total doubled degree in ``names``.

    ``sign=+1`` keeps terms with degree <= order2 (series around 0);
    ``sign=-1`` keeps terms with degree >= -order2 (series around infinity).
    """

    names: frozenset[str]
    order2: int
    sign: int = 1

    def keeps(self, m: Mono) -> bool:
        d = _mono_deg2(m, self.names)
        return d <= self.order2 if self.sign > 0 else d >= -self.order2


def _combine_trunc(a: Trunc | None, b: Trunc | None) -> Trunc | None:
    if a is None:
        return b
    if b is None:
        return a
    if a.sign != b.sign:
        raise ValueError("cannot combine series truncated in opposite directions")
    return Trunc(a.names | b.names, min(a.order2, b.order2), a.sign)


class LaurentElement:
    """A finite sum of rational multiples of monomials, optionally truncated.

    Immutable by convention: no method mutates ``terms`` after construction.
    Equality compares the stored terms only (truncation metadata is carried
    along but is not part of the mathematical value).
    """

    __slots__ = ("terms", "trunc")

    def __init__(
        self,
        terms: Mapping[Mono, Scalar] | None = None,
        trunc: Trunc | None = None,
    ) -> None:
        clean: dict[Mono, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = _frac(c)
                if not c:
                    continue
                m = _mono(m)
                if trunc is not None and not trunc.keeps(m):
                    continue
                acc = clean.get(m, _ZERO) + c
                if acc:
                    clean[m] = acc
                elif m in clean:
                    del clean[m]
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, name: str, value) -> None:  # pragma: no cover
        raise AttributeError("LaurentElement is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(trunc: Trunc | None = None) -> "LaurentElement":
        return LaurentElement({}, trunc)

    @staticmethod
    def const(c: Scalar, trunc: Trunc | None = None) -> "LaurentElement":
        return LaurentElement({(): _frac(c)}, trunc)

    @staticmethod
    def gen(name: str) -> "LaurentElement":
        return LaurentElement({((name, 2),): _ONE})

    @staticmethod
    def monomial(coeff: Scalar, exps: Mapping[str, Scalar]) -> "LaurentElement":
        m = _mono({v: _exp2(e) for v, e in exps.items()})
        return LaurentElement({m: _frac(coeff)})

    # -- basic queries -----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def as_fraction(self) -> Fraction | None:
        """The value as a rational constant, or None if not constant."""
        if not self.terms:
            return _ZERO
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def coeff_of(self, var: str, exponent: Scalar) -> "LaurentElement":
        """Coefficient of ``var**exponent`` as an element without ``var``."""
        e2 = _exp2(exponent)
        out: dict[Mono, Fraction] = {}
        for m, c in self.terms.items():
            d = dict(m)
            if d.pop(var, 0) == e2:
                out[tuple(sorted(d.items()))] = c
        return LaurentElement(out)

    def coeffs_in(self, var: str) -> dict[int, "LaurentElement"]:
        """Split into {doubled exponent of var: coefficient element}."""
        grouped: dict[int, dict[Mono, Fraction]] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e2 = d.pop(var, 0)
            grouped.setdefault(e2, {})[tuple(sorted(d.items()))] = c
        return {e2: LaurentElement(t) for e2, t in grouped.items()}

    def val2(self, var: str) -> int | None:
        """Minimal doubled exponent of ``var`` over all terms (None if zero)."""
        if not self.terms:
            return None
        return min(dict(m).get(var, 0) for m in self.terms)

    def max2(self, var: str) -> int | None:
        if not self.terms:
            return None
        return max(dict(m).get(var, 0) for m in self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, RationalElement):
            return NotImplemented
        other = as_element(other)
        trunc = _combine_trunc(self.trunc, other.trunc)
        out = dict(self.terms)
        for m, c in other.terms.items():
            acc = out.get(m, _ZERO) + c
            if acc:
                out[m] = acc
            elif m in out:
                del out[m]
        return LaurentElement(out, trunc)

    __radd__ = __add__

    def __neg__(self) -> "LaurentElement":
        return LaurentElement({m: -c for m, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        if isinstance(other, RationalElement):
            return NotImplemented
        return self + (-as_element(other))

    def __rsub__(self, other):
        if isinstance(other, RationalElement):
            return NotImplemented
        return as_element(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalElement):
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            c = _frac(other)
            if not c:
                return LaurentElement.zero(self.trunc)
            return LaurentElement({m: k * c for m, k in self.terms.items()}, self.trunc)
        other = as_element(other)
        trunc = _combine_trunc(self.trunc, other.trunc)
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                if trunc is not None and not trunc.keeps(m):
                    continue
                acc = out.get(m, _ZERO) + c1 * c2
                if acc:
                    out[m] = acc
                elif m in out:
                    del out[m]
        return LaurentElement(out, trunc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentElement":
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k < 0:
            return self.monomial_inverse() ** (-k)
        acc = LaurentElement.const(1, self.trunc)
        for _ in range(k):
            acc = acc * self
        return acc

    def monomial_inverse(self) -> "LaurentElement":
        if len(self.terms) != 1:
            raise ValueError("only single-term elements have a monomial inverse")
        (m, c), = self.terms.items()
        return LaurentElement({_mono_pow(m, -1): 1 / c})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / _frac(other))
        if isinstance(other, RationalElement):
            return as_rational(self) / other
        other = as_element(other)
        if other.is_monomial():
            return self * other.monomial_inverse()
        return RationalElement(self, other)

    def __rtruediv__(self, other):
        return as_rational(other) / as_rational(self)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalElement):
            return other == self
        try:
            other = as_element(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None  # type: ignore[assignment]

    # -- structure ---------------------------------------------------------

    def truncate(self, names: Iterable[str], order: int, sign: int = 1) -> "LaurentElement":
        t = _combine_trunc(self.trunc, Trunc(frozenset(names), 2 * order, sign))
        return LaurentElement(self.terms, t)

    def without_trunc(self) -> "LaurentElement":
        return LaurentElement(self.terms, None)

    def trunc_zero_part(self) -> "LaurentElement":
        """Terms of total degree 0 in the truncation variables."""
        if self.trunc is None:
            raise ValueError("element is not a truncated series")
        names = self.trunc.names
        return LaurentElement(
            {m: c for m, c in self.terms.items() if _mono_deg2(m, names) == 0}
        )

    def invert_series(self) -> "LaurentElement":
        """Inverse of a truncated series whose constant part is a monomial."""
        if self.trunc is None:
            if self.is_monomial():
                return self.monomial_inverse()
            raise ValueError("inversion of a multi-term element needs truncation")
        c0 = self.trunc_zero_part()
        if not c0.is_monomial():
            raise NonExpandable("series constant term is not an invertible monomial")
        c0inv = c0.monomial_inverse()
        h = (self - c0) * c0inv  # positive truncation-degree part
        acc = LaurentElement.const(1, self.trunc)
        term = acc
        while term:
            term = term * (-h)
            acc = acc + term
        return acc * c0inv

    def negate_var(self, var: str) -> "LaurentElement":
        """Substitute ``var -> var**-1`` by negating its exponents."""
        trunc = self.trunc
        if trunc is not None and var in trunc.names:
            if trunc.names != frozenset({var}):
                raise ValueError("cannot negate one variable of a joint truncation")
            trunc = Trunc(trunc.names, trunc.order2, -trunc.sign)
        out: dict[Mono, Fraction] = {}
        for m, c in self.terms.items():
            d = dict(m)
            if var in d:
                d[var] = -d[var]
            out[tuple(sorted(d.items()))] = c
        return LaurentElement(out, trunc)

    # -- substitution ------------------------------------------------------

    def subs_monomial(self, var: str, value: "LaurentElement") -> "LaurentElement":
        """Substitute a single-term value for ``var`` (any exponents)."""
        value = as_element(value)
        if len(value.terms) != 1:
            raise ValueError("subs_monomial needs a single-term value")
        (vm, vc), = value.terms.items()
        out: dict[Mono, Fraction] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e2 = d.pop(var, 0)
            if e2:
                if e2 % 2 == 0:
                    c = c * vc ** (e2 // 2)
                elif vc != 1:
                    raise ValueError(
                        "half-integer power of a value with coefficient != 1"
                    )
                scaled: list[tuple[str, int]] = []
                for w, f2 in vm:
                    prod = f2 * e2
                    if prod % 2:
                        raise ValueError("substitution produces a quarter-integer power")
                    scaled.append((w, prod // 2))
                newm = _mono_mul(tuple(sorted(d.items())), _mono(scaled))
            else:
                newm = tuple(sorted(d.items()))
            acc = out.get(newm, _ZERO) + c
            if acc:
                out[newm] = acc
            elif newm in out:
                del out[newm]
        return LaurentElement(out, self.trunc)

    def subs_poly(self, var: str, value: "LaurentElement") -> "LaurentElement":
        """Substitute a general value for ``var``; needs nonneg integer powers."""
        value = as_element(value)
        pieces = self.coeffs_in(var)
        trunc = _combine_trunc(self.trunc, value.trunc)
        acc = LaurentElement.zero(trunc)
        powers: dict[int, LaurentElement] = {0: LaurentElement.const(1, trunc)}
        for e2 in sorted(pieces):
            if e2 < 0 or e2 % 2:
                raise ValueError(
                    f"subs_poly needs nonnegative integer powers of {var!r}"
                )
            k = e2 // 2
            if k not in powers:
                p = powers[max(powers)]
                for _ in range(max(powers), k):
                    p = p * value
                powers[k] = p
            acc = acc + pieces[e2] * powers[k]
        return acc

    def subs_zero(self, var: str) -> "LaurentElement":
        """Substitute 0 for ``var`` (drops terms with positive powers)."""
        v2 = self.val2(var)
        if v2 is not None and v2 < 0:
            raise ZeroDivisionError(f"negative power of {var!r} at 0")
        return LaurentElement(self.coeff_of(var, 0).terms, self.trunc)

    def subs_one(self, var: str) -> "LaurentElement":
        """Substitute 1 for ``var`` (drops it from every monomial)."""
        out: dict[Mono, Fraction] = {}
        for m, c in self.terms.items():
            d = dict(m)
            d.pop(var, 0)
            newm = tuple(sorted(d.items()))
            acc = out.get(newm, _ZERO) + c
            if acc:
                out[newm] = acc
            elif newm in out:
                del out[newm]
        return LaurentElement(out, self.trunc)

    # -- display -----------------------------------------------------------

    def __repr__(self) -> str:
        return str(self)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for m, c in sorted(self.terms.items()):
            factors = []
            for v, e2 in m:
                if e2 == 2:
                    factors.append(v)
                elif e2 % 2 == 0:
                    factors.append(f"{v}^{e2 // 2}")
                else:
                    factors.append(f"{v}^({e2}/2)")
            body = "*".join(factors)
            ac = abs(c)
            if body and ac == 1:
                text = body
            elif body:
                text = f"{ac}*{body}"
            else:
                text = str(ac)
            if not parts:
                parts.append(text if c > 0 else f"-{text}")
            else:
                parts.append(f"+ {text}" if c > 0 else f"- {text}")
        return " ".join(parts)


def as_element(x) -> LaurentElement:
    if isinstance(x, LaurentElement):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentElement.const(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a Laurent element")


ONE = LaurentElement.const(1)
ZERO = LaurentElement.zero()


def _mono_content(el: LaurentElement) -> Mono:
    """Largest monomial dividing every term of ``el`` (exponent-wise min)."""
    if not el.terms:
        return ()
    names = el.variables()
    out = []
    for v in names:
        e = min(dict(m).get(v, 0) for m in el.terms)
        if e:
            out.append((v, e))
    return tuple(sorted(out))


class RationalElement:
    """Quotient of two untruncated Laurent elements.

    The denominator is normalized to have trivial monomial content; a
    single-term denominator is folded into the numerator, so elements that
    are secretly Laurent have ``den == 1``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None) -> None:
        num = as_element(num)
        den = ONE if den is None else as_element(den)
        if num.trunc is not None or den.trunc is not None:
            raise NonRational("truncated series cannot form a rational element")
        if not den.terms:
            raise ZeroDivisionError("zero denominator")
        content = _mono_content(den)
        if content:
            shrink = LaurentElement({_mono_pow(content, -1): _ONE})
            num = num * shrink
            den = den * shrink
        if den.is_monomial():
            num = num * den.monomial_inverse()
            den = ONE
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name: str, value) -> None:  # pragma: no cover
        raise AttributeError("RationalElement is immutable")

    # -- queries -----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_laurent(self) -> bool:
        return self.den == ONE

    def as_laurent(self) -> LaurentElement:
        if not self.is_laurent():
            raise NonRational(f"not a Laurent element: {self}")
        return self.num

    def maybe_laurent(self) -> "LaurentElement | RationalElement":
        return self.num if self.is_laurent() else self

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "RationalElement":
        other = as_rational(other)
        if self.den == other.den:
            return RationalElement(self.num + other.num, self.den)
        return RationalElement(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalElement":
        return RationalElement(-self.num, self.den)

    def __sub__(self, other) -> "RationalElement":
        return self + (-as_rational(other))

    def __rsub__(self, other) -> "RationalElement":
        return as_rational(other) - self

    def __mul__(self, other) -> "RationalElement":
        other = as_rational(other)
        return RationalElement(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalElement":
        other = as_rational(other)
        if not other.num.terms:
            raise ZeroDivisionError("division by zero rational element")
        return RationalElement(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalElement":
        return as_rational(other) / self

    def __pow__(self, k: int) -> "RationalElement":
        if k < 0:
            return (RationalElement(self.den, self.num)) ** (-k)
        return RationalElement(self.num**k, self.den**k)

    def __eq__(self, other) -> bool:
        try:
            other = as_rational(other)
        except TypeError:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None  # type: ignore[assignment]

    # -- substitution ------------------------------------------------------

    def subs_monomial(self, var: str, value: LaurentElement) -> "RationalElement":
        return RationalElement(
            self.num.subs_monomial(var, value), self.den.subs_monomial(var, value)
        )

    def subs_poly(self, var: str, value: LaurentElement) -> "RationalElement":
        num, den = self.num, self.den
        vmin = min(num.val2(var) or 0, den.val2(var) or 0)
        shift2 = max(0, -vmin)
        if shift2 % 2:
            shift2 += 1
        if shift2:
            scale = LaurentElement({((var, shift2),): _ONE})
            num = num * scale
            den = den * scale
        return RationalElement(num.subs_poly(var, value), den.subs_poly(var, value))

    def subs_one(self, var: str) -> "RationalElement":
        return RationalElement(self.num.subs_one(var), self.den.subs_one(var))

    def negate_var(self, var: str) -> "RationalElement":
        return RationalElement(self.num.negate_var(var), self.den.negate_var(var))

    def __repr__(self) -> str:
        return str(self)

    def __str__(self) -> str:
        if self.is_laurent():
            return str(self.num)
        return f"({self.num}) / ({self.den})"


def as_rational(x) -> RationalElement:
    if isinstance(x, RationalElement):
        return x
    return RationalElement(as_element(x))


# -- expansion and residues ---------------------------------------------------

Element = Union[LaurentElement, RationalElement]


def _expand_zero(
    num: LaurentElement, den: LaurentElement, var: str, order2: int
) -> LaurentElement:
    """Series of num/den around ``var = 0`` up to doubled degree order2."""
    trunc = Trunc(frozenset({var}), order2, 1)
    if not num.terms:
        return LaurentElement.zero(trunc)
    vd = den.val2(var)
    assert vd is not None
    dshift = den * LaurentElement({((var, -vd),): _ONE}) if vd else den
    d0 = LaurentElement(
        {m: c for m, c in dshift.terms.items() if dict(m).get(var, 0) == 0}
    )
    if not d0.is_monomial():
        raise NonExpandable(
            f"denominator constant term in {var!r} is not a single monomial"
        )
    h = (dshift - d0) * d0.monomial_inverse()
    pref = num * d0.monomial_inverse()
    if vd:
        pref = pref * LaurentElement({((var, -vd),): _ONE})
    sh = pref.val2(var)
    assert sh is not None
    inner2 = order2 - sh
    if inner2 < 0:
        return LaurentElement.zero(trunc)
    inner = Trunc(frozenset({var}), inner2, 1)
    acc = LaurentElement.const(1, inner)
    term = acc
    while term:
        term = term * (-h)
        acc = acc + term
    # Strip the inner truncation before the prefactor multiply: every kept
    # accumulator term may combine with prefactor terms of higher degree, and
    # the final truncation below is the only bound that matters.
    return LaurentElement((pref * acc.without_trunc()).terms, trunc)


def expand(f: Element, point: str, order: int, *, var: str = "z") -> LaurentElement:
    """Series expansion of a rational element around ``var = 0`` or infinity.

    Returns a truncated Laurent element: all terms with degree in ``var``
    up to ``order`` (around 0) or down to ``-order`` (around infinity) are
    exact.  Requires the denominator to become a unit monomial at the point
    after factoring out a power of ``var``; raises NonExpandable otherwise.
    """
    if point not in ("zero", "infinity"):
        raise ValueError("point must be 'zero' or 'infinity'")
    if isinstance(f, LaurentElement):
        if f.trunc is not None and var in f.trunc.names:
            raise NonRational(f"already a truncated series in {var!r}")
        sign = 1 if point == "zero" else -1
        return f.truncate({var}, order, sign)
    num, den = f.num, f.den
    if point == "infinity":
        num, den = num.negate_var(var), den.negate_var(var)
    res = _expand_zero(num, den, var, 2 * order)
    if point == "infinity":
        res = res.negate_var(var)
    return res


def expand_general(
    f: Element, point: str, order: int, *, var: str = "z"
) -> dict[Fraction, RationalElement]:
    """Expansion with coefficients in the rational-function field.

    Returns a map {exponent of var: coefficient}, where coefficients are
    rational elements in the remaining variables.  Handles denominators
    whose constant term is not a monomial (where ``expand`` raises).
    """
    if point not in ("zero", "infinity"):
        raise ValueError("point must be 'zero' or 'infinity'")
    f = as_rational(f) if isinstance(f, LaurentElement) else f
    num, den = f.num, f.den
    if num.trunc is not None or den.trunc is not None:
        raise NonRational("cannot expand a truncated series")
    if point == "infinity":
        num, den = num.negate_var(var), den.negate_var(var)
    if not num.terms:
        return {}
    vn, vd = num.val2(var), den.val2(var)
    assert vn is not None and vd is not None
    ncoeffs = {e2 - vn: el for e2, el in num.coeffs_in(var).items()}
    dcoeffs = {e2 - vd: el for e2, el in den.coeffs_in(var).items()}
    d0 = as_rational(dcoeffs[0])
    lead = vn - vd
    needed = 2 * order - lead
    out: dict[Fraction, RationalElement] = {}
    series: dict[int, RationalElement] = {}
    for j in range(0, max(needed, -1) + 1):
        s = as_rational(ncoeffs.get(j, ZERO))
        for i in range(1, j + 1):
            if i in dcoeffs and (j - i) in series:
                s = s - as_rational(dcoeffs[i]) * series[j - i]
        series[j] = s / d0
        if series[j]:
            e = Fraction(lead + j, 2)
            out[-e if point == "infinity" else e] = series[j]
    return out


def expand_around_one(
    f: Element, order: int, *, var: str = "z", aug: str = "zeta"
) -> dict[Fraction, RationalElement]:
    """Expansion around ``var = 1`` in powers of ``aug := 1 - var``."""
    shifted = as_rational(f).subs_poly(
        var, LaurentElement.const(1) - LaurentElement.gen(aug)
    )
    return expand_general(shifted, "zero", order, var=aug)


def residue_K(f: Element, *, var: str = "z"):
    """The degree-0 coefficient of (expansion at infinity - expansion at 0)."""
    if isinstance(f, LaurentElement):
        if f.trunc is not None and var in f.trunc.names:
            raise NonRational(f"residue of a truncated series in {var!r}")
        return LaurentElement.zero()
    try:
        fp = expand(f, "zero", 0, var=var).coeff_of(var, 0)
        fm = expand(f, "infinity", 0, var=var).coeff_of(var, 0)
        return (fm - fp).without_trunc()
    except NonExpandable:
        zero = Fraction(0)
        fp2 = expand_general(f, "zero", 0, var=var).get(zero, as_rational(0))
        fm2 = expand_general(f, "infinity", 0, var=var).get(zero, as_rational(0))
        return (fm2 - fp2).maybe_laurent()


def residue_coh(f: Element, *, var: str = "u"):
    """Coefficient of ``var**-1`` in the expansion around infinity."""
    if isinstance(f, LaurentElement):
        if f.trunc is not None and var in f.trunc.names:
            raise NonRational(f"residue of a truncated series in {var!r}")
        return f.coeff_of(var, -1)
    try:
        return expand(f, "infinity", 1, var=var).coeff_of(var, -1).without_trunc()
    except NonExpandable:
        got = expand_general(f, "infinity", 1, var=var).get(Fraction(-1))
        return got.maybe_laurent() if got is not None else LaurentElement.zero()


# -- series exponential / logarithm -------------------------------------------


def plethystic_exp(g: LaurentElement) -> LaurentElement:
    """exp of a truncated series with zero constant term."""
    g = as_element(g)
    if not g.terms:
        return LaurentElement.const(1, g.trunc)
    if g.trunc is None:
        raise ValueError("series exponential needs a truncated input")
    if g.trunc_zero_part():
        raise NonzeroConstantTerm("series exponential needs zero constant term")
    acc = LaurentElement.const(1, g.trunc)
    term = acc
    m = 0
    while term:
        m += 1
        term = term * g / m
        acc = acc + term
    return acc


def plethystic_log(f: LaurentElement) -> LaurentElement:
    """log of a truncated series with constant term 1."""
    f = as_element(f)
    if f.trunc is None:
        raise ValueError("series logarithm needs a truncated input")
    if f.trunc_zero_part() != ONE:
        raise NonzeroConstantTerm("series logarithm needs constant term 1")
    h = f - LaurentElement.const(1)
    acc = LaurentElement.zero(f.trunc)
    power = LaurentElement.const(1, f.trunc)
    m = 0
    while True:
        m += 1
        power = power * h
        if not power:
            break
        acc = acc + Fraction((-1) ** (m + 1), m) * power
    return acc


def exact_laurent_div(num: Element, den: Element, var: str) -> LaurentElement:
    """Exact division of Laurent polynomials along ``var``.

    Both inputs are read as Laurent polynomials in ``var`` with coefficients
    in the remaining variables.  The divisor's leading coefficient must be a
    single monomial and the division must leave no remainder; anything else
    raises NonExpandable.
    """
    num = as_element(num)
    den = as_element(den)
    if num.trunc is not None or den.trunc is not None:
        raise NonRational("exact division needs untruncated inputs")
    if not den.terms:
        raise ZeroDivisionError("exact division by zero")
    if not num.terms:
        return LaurentElement.zero()
    cn = num.coeffs_in(var)
    cd = den.coeffs_in(var)
    top = max(cd)
    lead = cd[top]
    if not lead.is_monomial():
        raise NonExpandable("divisor leading coefficient is not a single monomial")
    lead_inv = lead.monomial_inverse()
    # For an exact division the quotient's lowest var-degree is forced.
    floor = min(cn) - min(cd)
    rem = dict(cn)
    out = LaurentElement.zero()
    while rem:
        e = max(rem)
        qe = e - top
        if qe < floor:
            raise NonExpandable("division is not exact")
        qc = rem.pop(e) * lead_inv
        out = out + qc * LaurentElement.monomial(1, {var: Fraction(qe, 2)})
        for eb, cb in cd.items():
            if eb == top:
                continue
            ne = qe + eb
            acc = rem.get(ne, LaurentElement.zero()) - qc * cb
            if acc.terms:
                rem[ne] = acc
            elif ne in rem:
                del rem[ne]
    return out


# -- specialization at kappa = 1 ----------------------------------------------


def _divide_y_minus_one(el: LaurentElement, var: str) -> LaurentElement:
    """Exact division of el by (var**(1/2) - 1); el must vanish at var = 1."""
    coeffs = el.coeffs_in(var)
    if not coeffs:
        return ZERO
    lo, hi = min(coeffs), max(coeffs)
    if lo < 0:
        raise ValueError("clear negative powers before dividing")
    quot: dict[int, LaurentElement] = {}
    carry = ZERO
    for j in range(hi, 0, -1):
        carry = carry + coeffs.get(j, ZERO)
        quot[j - 1] = carry
    if carry + coeffs.get(0, ZERO) != ZERO:
        raise ValueError("element does not vanish at 1")
    out = LaurentElement.zero()
    for j, c in quot.items():
        out = out + c * LaurentElement({((var, j),): _ONE} if j else {(): _ONE})
    return out


def _clear_negative(el: LaurentElement, var: str) -> tuple[LaurentElement, int]:
    v = el.val2(var)
    if v is None or v >= 0:
        return el, 0
    return el * LaurentElement({((var, -v),): _ONE}), -v


def specialize_kappa(f: Element, *, var: str = "k"):
    """Value at ``var = 1`` when the limit exists; PoleAtOne otherwise."""
    if isinstance(f, LaurentElement):
        if f.trunc is not None and var in f.trunc.names:
            raise NonRational(f"cannot specialize a truncated series in {var!r}")
        return f.subs_one(var)
    num, _ = _clear_negative(f.num, var)
    den, _ = _clear_negative(f.den, var)
    while den.subs_one(var) == ZERO:
        if num.subs_one(var) != ZERO:
            raise PoleAtOne(f"genuine pole at {var} = 1")
        if not num.terms:
            break
        num = _divide_y_minus_one(num, var)
        den = _divide_y_minus_one(den, var)
    d1 = den.subs_one(var)
    if not num.terms:
        return LaurentElement.zero()
    result = num.subs_one(var) / d1
    if isinstance(result, RationalElement):
        return result.maybe_laurent()
    return result


def kappa_one_vanishing_order(f: Element, *, var: str = "k") -> int | None:
    """Order of vanishing at ``var = 1`` (negative for poles, None for 0)."""

    def _order(el: LaurentElement) -> int | None:
        if not el.terms:
            return None
        el, _ = _clear_negative(el, var)
        n = 0
        while el.subs_one(var) == ZERO:
            el = _divide_y_minus_one(el, var)
            n += 1
        return n

    if isinstance(f, LaurentElement):
        return _order(f)
    on = _order(f.num)
    if on is None:
        return None
    od = _order(f.den)
    assert od is not None
    return on - od


# -- slopes and weight symbols -------------------------------------------------


def _parse_slope_entry(x) -> tuple[int, Fraction]:
    if isinstance(x, (int, Fraction)):
        return (0, _frac(x))
    if isinstance(x, str):
        s = x.strip()
        if s in ("inf", "+inf"):
            return (1, _ZERO)
        if s == "-inf":
            return (-1, _ZERO)
        return (0, Fraction(s))
    raise ValueError(f"cannot parse slope entry {x!r}")


@dataclass(frozen=True)
class SlopeValue:
    """A lexicographically ordered tuple of rationals extended by +-infinity.

    Each entry is stored as (tier, value) with tier -1/0/+1 for -infinity,
    finite, +infinity; tuple comparison then realizes the total order.
    """

    entries: tuple[tuple[int, Fraction], ...]

    @staticmethod
    def of(*values) -> "SlopeValue":
        return SlopeValue(tuple(_parse_slope_entry(v) for v in values))

    def __lt__(self, other: "SlopeValue") -> bool:
        return self.entries < other.entries

    def __le__(self, other: "SlopeValue") -> bool:
        return self.entries <= other.entries

    def __gt__(self, other: "SlopeValue") -> bool:
        return self.entries > other.entries

    def __ge__(self, other: "SlopeValue") -> bool:
        return self.entries >= other.entries

    def __str__(self) -> str:
        def fmt(e: tuple[int, Fraction]) -> str:
            return {-1: "-inf", 1: "inf"}.get(e[0], str(e[1]))

        return "(" + ", ".join(fmt(e) for e in self.entries) + ")"


_KINDS = ("multiplicative", "additive", "formal")


@dataclass(frozen=True)
class WeightSymbol:
    """A declared variable name with its flavor of grading."""

    name: str
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if not self.name or not self.name.replace("_", "a").isalnum():
            raise ValueError(f"bad symbol name {self.name!r}")

    def el(self) -> LaurentElement:
        return LaurentElement.gen(self.name)
