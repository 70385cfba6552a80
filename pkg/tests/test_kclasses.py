"""Oracle tests for root-symbol classes, wedges, residues, and theta data."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from wallx.errors import ModeMismatch, NonExpandable, TrivialWeightAtOne
from wallx.kclasses import (
    AUG_Z,
    ThetaKernel,
    VirtualClass,
    aug_name,
    chern_character,
    complete_homogeneous,
    cy_limit_theta,
    elementary_symmetric,
    euler,
    projective_pushforward_K,
    projective_pushforward_coh,
    projective_pushforward_symmetrized,
    pushforward_closed_K,
    pushforward_closed_coh,
    quantum_integer,
    rigidity_residue,
    rigidity_residue_coh,
    segre_class,
    symmetrized_wedge,
    theta,
    theta_closed,
    theta_coefficients,
    wedge,
)
from wallx.ring import (
    LaurentElement,
    Trunc,
    as_rational,
    exact_laurent_div,
    expand,
    specialize_kappa,
)

L = LaurentElement
one = L.const(1)
z = L.gen("z")
kap = L.gen("k")
khalf = L.monomial(1, {"k": Fraction(1, 2)})
hbar = L.gen("hbar")


def _half(m: L, sign: int) -> L:
    """Half power of a coefficient-1 monomial, built by hand for oracles."""
    ((mono, coeff),) = m.terms.items()
    assert coeff == 1
    return L.monomial(1, {v: Fraction(e * sign, 4) for v, e in mono})


def _random_honest(rng: random.Random, nroots: int, mode: str = "K") -> VirtualClass:
    roots = []
    for _ in range(nroots):
        if mode == "K":
            exps = {f"t{j}": rng.randint(-1, 2) for j in range(3)}
            roots.append(L.monomial(1, exps))
        else:
            roots.append(
                sum((rng.randint(-2, 2) * L.gen(f"w{j}") for j in range(3)), L.zero())
            )
    return VirtualClass(roots, mode)


# -- quantum integers ------------------------------------------------------------


def test_quantum_integer_small_values() -> None:
    assert quantum_integer(0) == L.zero()
    assert quantum_integer(1) == one
    assert quantum_integer(2) == -(khalf + khalf.monomial_inverse())
    assert quantum_integer(3) == kap + one + kap.monomial_inverse()


def test_quantum_integer_defining_ratio() -> None:
    gap = khalf - khalf.monomial_inverse()
    for n in range(1, 9):
        big = L.monomial(1, {"k": Fraction(n, 2)})
        assert quantum_integer(n) * gap == (-1) ** (n - 1) * (
            big - big.monomial_inverse()
        )


def test_quantum_integer_odd_symmetry() -> None:
    for n in range(0, 7):
        assert quantum_integer(-n) == -quantum_integer(n)


def test_quantum_integer_kappa_one_limit() -> None:
    for n in range(1, 9):
        assert specialize_kappa(quantum_integer(n)) == L.const((-1) ** (n - 1) * n)


# -- virtual classes -------------------------------------------------------------


def test_virtual_class_rank_dual_twist() -> None:
    t1, t2 = L.gen("t1"), L.gen("t2")
    E = VirtualClass([t1, (t2, -1)])
    assert E.rank == 0
    assert not E.honest
    assert E.dual().roots[0][0] == t1.monomial_inverse()
    assert E.twist(kap).roots[1] == (kap * t2, -1)
    assert (-E).rank == 0
    assert (E + VirtualClass([t1])).rank == 1


def test_virtual_class_rejects_non_monomial_weight() -> None:
    with pytest.raises(ValueError):
        VirtualClass([L.gen("t1") + 1])
    with pytest.raises(ValueError):
        VirtualClass([3 * L.gen("t1")])


def test_coh_mode_allows_additive_weights() -> None:
    E = VirtualClass([L.gen("w1") + hbar], mode="coh")
    assert E.dual().roots[0][0] == -L.gen("w1") - hbar
    assert E.twist(hbar).roots[0][0] == L.gen("w1") + 2 * hbar


def test_chern_character_from_roots() -> None:
    w1, w2 = L.gen("w1"), L.gen("w2")
    E = VirtualClass([w1, (w2, -1)], mode="coh")
    assert chern_character(E, 0) == L.zero()
    assert chern_character(E, 1) == w1 - w2
    assert chern_character(E, 2) == Fraction(1, 2) * (w1**2 - w2**2)


# -- wedge classes ---------------------------------------------------------------


def test_wedge_single_trivial_root() -> None:
    assert wedge(VirtualClass.line(1)) == one - z


def test_wedge_rejects_additive_mode() -> None:
    with pytest.raises(ModeMismatch):
        wedge(VirtualClass([L.gen("w1")], mode="coh"))


def test_wedge_symmetry_identity() -> None:
    # wedge_{-z}(E) = (-z)**rank det(E) wedge_{-1/z}(E dual) for honest E.
    rng = random.Random(3)
    for _ in range(6):
        E = _random_honest(rng, rng.randint(1, 3))
        r = E.rank
        lhs = wedge(E, z)
        rhs = (-z) ** r * E.det() * wedge(E.dual(), z.monomial_inverse())
        assert lhs == rhs


def test_symmetrized_wedge_single_root() -> None:
    t1 = L.gen("t1")
    assert symmetrized_wedge(VirtualClass.line(t1)) == _half(z * t1, -1) - _half(
        z * t1, 1
    )


def test_symmetrized_wedge_symmetry_identity() -> None:
    # hat-wedge_{-z}(E) = (-1)**rank hat-wedge_{-1/z}(E dual) for honest E.
    rng = random.Random(4)
    for _ in range(6):
        E = _random_honest(rng, rng.randint(1, 3))
        lhs = symmetrized_wedge(E, z)
        rhs = (-1) ** E.rank * symmetrized_wedge(E.dual(), z.monomial_inverse())
        assert lhs == rhs


def test_wedge_inverse_root_matches_displayed_series() -> None:
    # 1/(1 - zL) = L_dual sum_k (1 - L_dual)**k / (1-z)**(k+1) in coordinates
    # xi = (1-z)**(-1), lam = 1 - L.  The expected side is assembled from its
    # own primitives (series inversion), not from the wedge machinery.
    E = VirtualClass([(L.gen("t1"), -1)])
    got = wedge(E)
    order2 = got.trunc.order2
    tr = Trunc(frozenset({AUG_Z, aug_name("t1")}), order2, 1)
    lam = L.gen(aug_name("t1")) * L.const(1, tr)
    xi = L.gen(AUG_Z)
    ldual = (L.const(1, tr) - lam).invert_series()
    want = L.zero(tr)
    k = 0
    while 2 * (2 * k + 1) <= order2:
        want = want + ldual * (L.const(1, tr) - ldual) ** k * xi ** (k + 1)
        k += 1
    assert got == want


def test_wedge_inverse_times_exact_factor_is_one() -> None:
    # The product of the inverse series with the substituted exact factor is 1
    # strictly inside the truncation window.  (Terms at the outermost kept
    # degree are polluted: the factor's xi**(-1) part pulls dropped terms in.)
    t1 = L.gen("t1")
    E = VirtualClass([(t1, -1)])
    inv = wedge(E, order=6)
    tr = inv.trunc
    lam = L.gen(aug_name("t1")) * L.const(1, tr)
    wt = L.const(1, tr) - lam
    xi_inv = L.gen(AUG_Z).monomial_inverse()
    factor = (L.const(1, tr) - wt) + xi_inv * wt
    names = {AUG_Z, aug_name("t1")}
    assert (inv * factor).truncate(names, 5) == L.const(1).truncate(names, 5)


# -- Euler classes ---------------------------------------------------------------


def test_euler_single_root_expansion() -> None:
    t1 = L.gen("t1")
    got = euler(VirtualClass.line(t1))
    assert got == one - (z * t1).monomial_inverse()


def test_euler_times_euler_of_negative_is_one() -> None:
    rng = random.Random(5)
    for _ in range(4):
        E = _random_honest(rng, rng.randint(1, 3))
        assert euler(E) * euler(-E) == as_rational(one)


def test_euler_virtual_expansion_alternating_sym() -> None:
    # Expansion at 1/z = 0 of e_z(E1 - E2) is
    # sum_{i,j} z**-(i+j) (-1)**i wedge^i(E1 dual) Sym^j(E2 dual).
    t1, t2, s1, s2 = (L.gen(v) for v in ("t1", "t2", "s1", "s2"))
    E = VirtualClass([t1, t2, (s1, -1), (s2, -1)])
    f = euler(E)
    got = expand(f, "infinity", 4)
    tinv = [t1.monomial_inverse(), t2.monomial_inverse()]
    sinv = [s1.monomial_inverse(), s2.monomial_inverse()]
    want = L.zero(got.trunc)
    for i in range(3):
        for j in range(5 - i):
            want = want + (
                (-1) ** i
                * elementary_symmetric(i, tinv)
                * complete_homogeneous(j, sinv)
                * L.monomial(1, {"z": -(i + j)})
            )
    assert got == want


def test_euler_at_one_rejects_trivial_weight() -> None:
    E = VirtualClass([L.gen("t1"), one])
    with pytest.raises(TrivialWeightAtOne):
        euler(E, z=None)
    assert euler(VirtualClass.line(L.gen("t1")), z=None) == one - L.gen(
        "t1"
    ).monomial_inverse()


# -- theta kernel ----------------------------------------------------------------


def test_theta_of_zero_classes_is_one() -> None:
    th = theta(VirtualClass(), VirtualClass())
    assert th.value == as_rational(one)
    assert th.residue() == L.zero()


def test_theta_kappa_symmetric_pair_display() -> None:
    # For E_ab = [1/(kappa L)] and E_ba = -kappa^{-1} E_ab dual = -[L], the
    # kernel is ((z kappa L)^{-1/2} - (z kappa L)^{1/2}) / ((zL)^{1/2} - (zL)^{-1/2}).
    Lw = L.gen("Lw")
    e_ab = VirtualClass.line(kap.monomial_inverse() * Lw.monomial_inverse())
    e_ba = -VirtualClass.line(Lw)
    assert e_ba == -e_ab.dual().twist(kap.monomial_inverse())
    th = theta(e_ab, e_ba)
    num = _half(z * kap * Lw, -1) - _half(z * kap * Lw, 1)
    den = _half(z * Lw, 1) - _half(z * Lw, -1)
    assert th.value == as_rational(num) / den
    assert th.residue() == khalf.monomial_inverse() - khalf


def test_theta_shift_identity() -> None:
    # Twisting the two sides by w^{-1} and w equals substituting z -> w z.
    t1, t2 = L.gen("t1"), L.gen("t2")
    e_ab = VirtualClass([t1, kap * t2])
    e_ba = VirtualClass([(t1.monomial_inverse(), -1), (t2, 1)])
    th = theta(e_ab, e_ba)
    w = L.gen("w")
    assert th.shift(w).value == th.substituted(w)


def test_theta_rejects_additive_mode() -> None:
    with pytest.raises(ModeMismatch):
        ThetaKernel(VirtualClass([L.gen("w1")], mode="coh"), VirtualClass())


# -- rigidity --------------------------------------------------------------------


def test_rigidity_residue_closed_form() -> None:
    # Independent oracle: the two constant-limit values (-kappa**(1/2))**r and
    # (-kappa**(-1/2))**r, assembled by hand.
    for r in range(1, 6):
        V = VirtualClass([L.gen(f"t{i}") for i in range(r)])
        want = (-khalf) ** r - (-khalf.monomial_inverse()) ** r
        assert rigidity_residue(V) == want


def test_rigidity_residue_is_gap_times_quantum_integer() -> None:
    gap = khalf.monomial_inverse() - khalf
    for r in range(1, 6):
        V = VirtualClass([L.gen(f"t{i}") for i in range(r)])
        assert exact_laurent_div(rigidity_residue(V), gap, "k") == quantum_integer(r)


def test_rigidity_residue_coh_value() -> None:
    for r in range(1, 5):
        V = VirtualClass([L.gen(f"w{i}") for i in range(r)], mode="coh")
        assert rigidity_residue_coh(V) == (-1) ** r * r * hbar


# -- projective pushforwards -----------------------------------------------------


def test_pushforward_K_matches_closed_table() -> None:
    s = L.gen("s")
    for r in range(1, 5):
        V = VirtualClass([L.gen(f"t{i}") for i in range(r)])
        for k in range(-6, 7):
            f = L.monomial(1, {"s": k})
            assert projective_pushforward_K(f, V) == pushforward_closed_K(k, V)
        assert projective_pushforward_K(3 * s**2 - L.monomial(1, {"s": -3}), V) == (
            3 * pushforward_closed_K(2, V) - pushforward_closed_K(-3, V)
        )


def test_pushforward_K_hand_picked_cases() -> None:
    t1, t2 = L.gen("t1"), L.gen("t2")
    V = VirtualClass([t1, t2])
    assert pushforward_closed_K(0, V) == one
    assert pushforward_closed_K(-1, V) == L.zero()
    assert pushforward_closed_K(-2, V) == -t1 * t2
    assert pushforward_closed_K(1, V) == t1.monomial_inverse() + t2.monomial_inverse()


def test_pushforward_symmetrized_unit_gives_quantum_integer() -> None:
    for r in range(1, 5):
        V = VirtualClass([L.gen(f"t{i}") for i in range(r)])
        assert projective_pushforward_symmetrized(1, V) == quantum_integer(r)


def test_pushforward_coh_gives_segre_classes() -> None:
    h = L.gen("h")
    for r in range(1, 5):
        V = VirtualClass([L.gen(f"w{i}") for i in range(r)], mode="coh")
        for k in range(0, 7):
            assert projective_pushforward_coh(h**k, V) == pushforward_closed_coh(k, V)
        assert pushforward_closed_coh(r - 1, V) == one
        assert pushforward_closed_coh(r, V) == -sum(
            (L.gen(f"w{i}") for i in range(r)), L.zero()
        )


def test_segre_class_inverts_total_chern_class() -> None:
    # sum_j s_j u**j is the inverse of sum_i c_i u**i, checked to degree 4.
    roots = [L.gen("w1"), L.gen("w2")]
    V = VirtualClass(roots, mode="coh")
    u = L.gen("u")
    tr = Trunc(frozenset({"u"}), 8, 1)
    total_c = L.const(1, tr)
    for w in roots:
        total_c = total_c * (L.const(1, tr) + u * w)
    total_s = L.zero(tr)
    for j in range(5):
        total_s = total_s + segre_class(V, j) * u**j
    assert total_c * total_s == L.const(1, tr)


# -- theta coefficients ----------------------------------------------------------


def _gbinom(a: int, m: int) -> Fraction:
    acc = Fraction(1)
    for i in range(m):
        acc = acc * (a - i)
    return acc / math.factorial(m)


def test_theta_series_matches_closed_form() -> None:
    for rk in (1, 2, 3):
        series = theta_coefficients(rk, 6)
        closed = [theta_closed(rk, n) for n in range(7)]
        assert series == closed


def test_theta_series_matches_closed_form_negative_rank() -> None:
    assert theta_coefficients(-1, 4) == [theta_closed(-1, n) for n in range(5)]


def test_theta_low_coefficients() -> None:
    ch1 = L.gen("ch1")
    for rk in (1, 2, 3):
        sign = 1 if rk % 2 == 0 else -1
        assert theta_closed(rk, 0) == L.const(sign)
        assert theta_closed(rk, 1) == -sign * rk * hbar
        assert theta_closed(rk, 2) == sign * (_gbinom(rk, 2) * hbar**2 - hbar * ch1)


def test_theta_hbar_divisibility() -> None:
    for rk in (1, 2, 3):
        for n in range(1, 7):
            assert theta_closed(rk, n).subs_zero("hbar") == L.zero()


def test_theta_cy_limit() -> None:
    for rk in (1, 2, 3):
        sign = 1 if rk % 2 == 0 else -1
        for n in range(1, 6):
            want = -sign * math.factorial(n) * L.gen(f"ch{n}")
            assert cy_limit_theta(rk, n) == want


def test_theta_coefficients_from_root_class() -> None:
    V = VirtualClass([L.gen("w1"), L.gen("w2")], mode="coh")
    assert theta_coefficients(V, 4) == [theta_closed(V, n) for n in range(5)]
    assert theta_closed(V, 1) == -2 * hbar
    assert theta_closed(V, 2) == hbar**2 - hbar * (L.gen("w1") + L.gen("w2"))


def test_theta_coefficients_reject_K_mode() -> None:
    with pytest.raises(ModeMismatch):
        theta_coefficients(VirtualClass([L.gen("t1")]), 2)
