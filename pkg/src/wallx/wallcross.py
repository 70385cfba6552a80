"""Wall-crossing sums over pluggable graded Lie backends.

Invariant tables map effective classes to coefficient-ring values; the
bracket side is either the formal free Lie algebra on class symbols or the
quantum torus, whose bracket multiplies values and picks up the quantum
integer of the pairing of the classes.  The main entry points assemble the
universal-coefficient Lie element and push it through a backend, evaluate
the framed pair sum with its distinguished degree-zero slot, invert that sum
by rank induction, and compute the numerical wall-crossing sum directly from
the left-nested product formula.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping

from .errors import (
    MissingChi,
    MissingFr,
    UnsupportedClass,
    ZeroQuantumInteger,
)
from .freelie import LieContext, LieElement, evaluate_lie
from .kclasses import KAPPA, quantum_integer
from .ring import LaurentElement, exact_laurent_div
from .ucoeff import (
    EffectiveMonoid,
    StabilityData,
    U_coeff,
    _chi_from_matrix,
    as_class,
    class_sum,
    utilde_lie_element,
)


def unrefined_integer(n: int, *, kappa: str = KAPPA) -> LaurentElement:
    """The length-one specialization of the quantum integer: (-1)^(n-1)·n."""
    return LaurentElement.const(n if n % 2 == 1 else -n)


class GradedValue:
    """A coefficient value tagged with its class; class None marks zero."""

    __slots__ = ("cls", "value")

    def __init__(self, cls, value):
        object.__setattr__(self, "cls", None if cls is None else as_class(cls))
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("GradedValue is immutable")

    def __add__(self, other: "GradedValue") -> "GradedValue":
        if not isinstance(other, GradedValue):
            return NotImplemented
        if self.cls is None:
            return other
        if other.cls is None:
            return self
        if self.cls != other.cls:
            raise ValueError(
                f"cannot add values of classes {self.cls} and {other.cls}"
            )
        return GradedValue(self.cls, self.value + other.value)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedValue):
            return NotImplemented
        return self.cls == other.cls and self.value == other.value

    __hash__ = None

    def __repr__(self) -> str:
        return f"GradedValue({self.cls}, {self.value!r})"


class QuantumTorusBackend:
    """Bracket (α, v), (β, w) -> (α+β, [χ(α,β)]·v·w) over a κ-Laurent ring.

    ``chi`` is an antisymmetric integer pairing (callable or matrix); the
    quantum-integer map is pluggable so the same sums can be run unrefined.
    """

    __slots__ = ("chi", "qint", "kappa")

    def __init__(self, chi, *, qint=None, kappa: str = KAPPA):
        if chi is None:
            raise MissingChi("the quantum torus needs a pairing form")
        if not callable(chi):
            chi = _chi_from_matrix(chi)
        if qint is None:
            qint = lambda n: quantum_integer(n, kappa=kappa)
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "qint", qint)
        object.__setattr__(self, "kappa", kappa)

    def __setattr__(self, name, value):
        raise AttributeError("QuantumTorusBackend is immutable")

    def zero(self) -> GradedValue:
        return GradedValue(None, LaurentElement.zero())

    def lift(self, cls, value) -> GradedValue:
        if value is None:
            return self.zero()
        if not isinstance(value, LaurentElement):
            value = LaurentElement.const(value)
        return GradedValue(cls, value)

    def bracket(self, x: GradedValue, y: GradedValue) -> GradedValue:
        if x.cls is None or y.cls is None:
            return self.zero()
        weight = self.qint(self.chi(x.cls, y.cls))
        return GradedValue(
            tuple(a + b for a, b in zip(x.cls, y.cls)),
            weight * x.value * y.value,
        )

    def scale(self, coeff, x: GradedValue) -> GradedValue:
        if x.cls is None:
            return x
        return GradedValue(x.cls, coeff * x.value)


class FreeLieBackend:
    """Formal backend: classes stay free Lie symbols in a declared context."""

    __slots__ = ("context",)

    def __init__(self, context: LieContext):
        object.__setattr__(self, "context", context)

    def __setattr__(self, name, value):
        raise AttributeError("FreeLieBackend is immutable")

    def zero(self) -> LieElement:
        return LieElement.zero(self.context)

    def lift(self, cls, value) -> LieElement:
        if value is None:
            return self.zero()
        if not isinstance(value, LieElement):
            raise TypeError("free Lie backend entries must be Lie elements")
        return value

    def bracket(self, x: LieElement, y: LieElement) -> LieElement:
        return x.bracket(y)

    def scale(self, coeff, x: LieElement) -> LieElement:
        return x * coeff


class InvariantTable:
    """Finitely supported map from effective classes to coefficient values.

    Missing classes raise UnsupportedClass unless ``zero_missing`` is set, in
    which case they count as zero.  The optional ``o`` map carries the
    cosection counts used by the reduced sums, and an optional monoid
    validates that the support lies in the effective cone.
    """

    __slots__ = ("entries", "o", "zero_missing", "monoid")

    def __init__(
        self,
        entries: Mapping,
        *,
        o: Mapping | None = None,
        zero_missing: bool = False,
        monoid: EffectiveMonoid | None = None,
    ):
        clean = {as_class(cls): value for cls, value in entries.items()}
        if monoid is not None:
            for cls in clean:
                if not monoid.contains(cls):
                    raise ValueError(f"class {cls} is not effective")
        counts = None
        if o is not None:
            counts = {}
            for cls, count in o.items():
                count = int(count)
                if count < 0:
                    raise ValueError("o counts must be nonnegative")
                counts[as_class(cls)] = count
        object.__setattr__(self, "entries", clean)
        object.__setattr__(self, "o", counts)
        object.__setattr__(self, "zero_missing", bool(zero_missing))
        object.__setattr__(self, "monoid", monoid)

    def __setattr__(self, name, value):
        raise AttributeError("InvariantTable is immutable")

    def support(self) -> list:
        return sorted(self.entries)

    def value(self, cls):
        cls = as_class(cls)
        if cls in self.entries:
            return self.entries[cls]
        if self.zero_missing:
            return None
        raise UnsupportedClass(f"no invariant for class {cls}")

    def o_of(self, cls) -> int:
        cls = as_class(cls)
        if self.o is None or cls not in self.o:
            raise ValueError(f"no o count for class {cls}")
        return self.o[cls]


def _require_monoid(table: InvariantTable, monoid) -> EffectiveMonoid:
    monoid = monoid if monoid is not None else table.monoid
    if monoid is None:
        raise ValueError("an effective monoid is required (table or keyword)")
    return monoid


def wcf_rhs(
    alpha,
    tau: StabilityData,
    tau_prime: StabilityData,
    table: InvariantTable,
    backend,
    *,
    monoid: EffectiveMonoid | None = None,
    max_parts: int = 8,
):
    """Σ over splittings of Ũ(α₁,…,α_n; τ, τ′) times the nested bracket of
    the table entries, assembled through the canonical Lie element so the
    result cannot depend on any coefficient convention."""
    alpha = as_class(alpha)
    monoid = _require_monoid(table, monoid)
    element = utilde_lie_element(alpha, tau, tau_prime, monoid, max_parts=max_parts)
    if element.is_zero():
        return backend.zero()
    return evaluate_lie(
        element,
        lambda cls: backend.lift(cls, table.value(cls)),
        backend.bracket,
        backend.zero(),
        scale=backend.scale,
    )


def reduced_filter(decompositions, o_table, o_alpha: int):
    """Keep the splittings whose o counts add up to the target count."""
    if isinstance(o_table, InvariantTable):
        lookup = o_table.o_of
    elif callable(o_table):
        lookup = o_table
    else:
        mapping = {as_class(cls): int(v) for cls, v in o_table.items()}

        def lookup(cls):
            cls = as_class(cls)
            if cls not in mapping:
                raise ValueError(f"no o count for class {cls}")
            return mapping[cls]

    o_alpha = int(o_alpha)
    return [
        parts
        for parts in decompositions
        if sum(lookup(p) for p in parts) == o_alpha
    ]


def _fr_lookup(fr, tau: StabilityData | None):
    if fr is None:
        if tau is None:
            raise MissingFr("no fr values supplied")
        return tau.fr
    if callable(fr):
        return fr

    mapping = {as_class(cls): int(v) for cls, v in fr.items()}

    def lookup(cls):
        cls = as_class(cls)
        if cls not in mapping:
            raise MissingFr(f"no fr value for class {cls}")
        return mapping[cls]

    return lookup


def _extended_backend(backend: QuantumTorusBackend, fr) -> QuantumTorusBackend:
    """Adjoin the distinguished degree-zero slot: one extra coordinate whose
    pairing against a class β is fr(β)."""
    base_chi = backend.chi

    def chi(x, y):
        out = base_chi(x[:-1], y[:-1])
        if y[-1]:
            out += y[-1] * fr(x[:-1])
        if x[-1]:
            out -= x[-1] * fr(y[:-1])
        return out

    return QuantumTorusBackend(chi, qint=backend.qint, kappa=backend.kappa)


def _equal_slope_decompositions(
    monoid: EffectiveMonoid, alpha, tau: StabilityData, max_parts: int
):
    target_slope = tau.slope_of(alpha)
    return [
        parts
        for parts in monoid.decompositions(alpha, max_parts=max_parts)
        if all(tau.slope_of(p) == target_slope for p in parts)
    ]


def pair_invariant_rhs(
    alpha,
    fr,
    tau: StabilityData,
    table: InvariantTable,
    backend: QuantumTorusBackend,
    *,
    monoid: EffectiveMonoid | None = None,
    max_parts: int = 8,
    min_parts: int = 1,
) -> LaurentElement:
    """Framed pair sum: Σ over equal-slope splittings, weighted 1/n!, of the
    nested brackets [z_{α_n},[…,[z_{α_1},∂]…]] against the degree-zero slot.

    Each bracket against the accumulated right-hand side contributes the
    quantum integer of fr(α_i) plus the pairing of α_i with the partial sum,
    so the n = 1 term is [fr(α)]·table(α)."""
    alpha = as_class(alpha)
    monoid = _require_monoid(table, monoid)
    fr = _fr_lookup(fr, tau)
    extended = _extended_backend(backend, fr)
    dim = len(alpha)
    slot = extended.lift((0,) * dim + (1,), LaurentElement.const(1))
    acc = LaurentElement.zero()
    for parts in _equal_slope_decompositions(monoid, alpha, tau, max_parts):
        if len(parts) < min_parts:
            continue
        nested = slot
        for cls in parts:
            entry = extended.lift(cls + (0,), table.value(cls))
            nested = extended.bracket(entry, nested)
        if nested.cls is None:
            continue
        acc = acc + Fraction(1, math.factorial(len(parts))) * nested.value
    return acc


def invert_semistable(
    pair_table: InvariantTable,
    fr,
    tau: StabilityData,
    backend: QuantumTorusBackend,
    *,
    monoid: EffectiveMonoid | None = None,
    max_parts: int = 8,
) -> InvariantTable:
    """Recover the invariant table from its framed pair sums.

    Works by induction on the rank carried by ``tau``: every proper
    equal-slope summand has smaller rank, so the n ≥ 2 contributions are
    already known and the n = 1 term divides out exactly by [fr(α)]."""
    monoid = _require_monoid(pair_table, monoid)
    fr_of = _fr_lookup(fr, tau)
    recovered: dict[tuple, LaurentElement] = {}
    for cls in sorted(pair_table.support(), key=tau.rank_of):
        fr_val = fr_of(cls)
        if fr_val == 0:
            raise ZeroQuantumInteger(
                f"fr({cls}) = 0 gives a vanishing quantum integer"
            )
        partial = InvariantTable(recovered, zero_missing=True, monoid=monoid)
        higher = pair_invariant_rhs(
            cls,
            fr_of,
            tau,
            partial,
            backend,
            monoid=monoid,
            max_parts=max_parts,
            min_parts=2,
        )
        value = pair_table.value(cls)
        if not isinstance(value, LaurentElement):
            value = LaurentElement.const(value)
        recovered[cls] = exact_laurent_div(
            value - higher, backend.qint(fr_val), backend.kappa
        )
    return InvariantTable(recovered, monoid=monoid)


def vw_wcf(
    alpha,
    tau_one: StabilityData,
    tau_two: StabilityData,
    table: InvariantTable,
    chi,
    *,
    qint=None,
    kappa: str = KAPPA,
    monoid: EffectiveMonoid | None = None,
    max_parts: int = 8,
    o_table=None,
    o_alpha: int | None = None,
) -> LaurentElement:
    """Numerical wall-crossing sum, written directly as
    Σ Ũ(α⃗; τ₁, τ₂)·Π_{i≥2}[χ(α₁+…+α_{i−1}, α_i)]·Π table(α_i);
    specializing the bracket route to the quantum torus gives the same value."""
    alpha = as_class(alpha)
    monoid = _require_monoid(table, monoid)
    if chi is None:
        raise MissingChi("the numerical sum needs a pairing form")
    if not callable(chi):
        chi = _chi_from_matrix(chi)
    if qint is None:
        qint = lambda n: quantum_integer(n, kappa=kappa)
    decomps = monoid.decompositions(alpha, max_parts=max_parts)
    if o_table is not None:
        if o_alpha is None:
            if isinstance(o_table, InvariantTable):
                o_alpha = o_table.o_of(alpha)
            else:
                o_alpha = o_table[alpha]
        decomps = reduced_filter(decomps, o_table, o_alpha)
    acc = LaurentElement.zero()
    for parts in decomps:
        u = U_coeff(parts, tau_one, tau_two)
        if not u:
            continue
        term = LaurentElement.const(u / len(parts))
        partial = (0,) * len(alpha)
        for i, cls in enumerate(parts):
            if i > 0:
                term = term * qint(chi(partial, cls))
            value = table.value(cls)
            if value is None:
                term = LaurentElement.zero()
                break
            term = term * value
            partial = tuple(a + b for a, b in zip(partial, cls))
        acc = acc + term
    return acc
