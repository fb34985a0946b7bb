import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import GF as SymGF
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem

from kmul.field import (
    ExtensionField,
    FieldElement,
    FieldTower,
    count_irreducibles,
    enumerate_irreducibles,
    extension,
    field,
    format_poly,
    is_irreducible,
    poly_add,
    poly_divmod,
    poly_gcd,
    poly_mod,
    poly_mul,
    prime_power,
    smallest_irreducible,
)

ZZ = SymGF(2).dom  # integer domain used by galoistools


def desc(f):
    """ascending tuple -> sympy's descending list"""
    out = list(reversed(f))
    while out and out[0] == 0:
        out.pop(0)
    return out


def asc(f):
    return tuple(reversed(f)) if f else ()


def test_prime_power():
    assert prime_power(9) == (3, 2)
    assert prime_power(7) == (7, 1)
    for bad in (1, 6, 12, 0):
        with pytest.raises(ValueError):
            prime_power(bad)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_prime_field_matches_integers(p):
    F = field(p)
    for a in range(p):
        for b in range(p):
            assert F.add(a, b) == (a + b) % p
            assert F.mul(a, b) == (a * b) % p
        if a:
            assert (a * F.inv(a)) % p == 1


def test_small_examples():
    assert field(5).mul(3, 4) == 2
    F2 = field(2)
    K = extension(F2, (1, 1, 1))
    assert K.inv((0, 1)) == (1, 1)
    assert K.mul((0, 1), (0, 1)) == (1, 1)
    for a in K.elements():
        assert K.mul(a, K.one) == a
    with pytest.raises(ZeroDivisionError):
        F2.inv(0)
    with pytest.raises(ZeroDivisionError):
        K.inv(K.zero)


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25])
def test_prime_power_field_axioms(q):
    F = field(q)
    els = list(F.elements())
    assert len(els) == q
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, q - 1) == 1
    # cyclic multiplicative group
    orders = []
    for a in els[1:]:
        e, x = 1, a
        while x != 1:
            x, e = F.mul(x, a), e + 1
        orders.append(e)
    assert max(orders) == q - 1
    for a, b, c in itertools.islice(itertools.product(els, repeat=3), 2000):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


def test_default_moduli():
    assert field(4).modulus == (1, 1, 1)
    assert field(9).modulus == (1, 0, 1)
    assert smallest_irreducible(field(2), 3) == (1, 0, 1, 1)


def test_poly_examples():
    F2, F3 = field(2), field(3)
    assert poly_mul(F2, (1, 1), (1, 1)) == (1, 0, 1)
    assert poly_mod(F2, (0, 0, 1), (1, 1, 1)) == (1, 1)
    assert poly_gcd(F3, (2, 0, 1), (2, 1)) == (2, 1)
    q, r = poly_divmod(F3, (1, 2, 0, 1), (1, 1))
    assert poly_add(F3, poly_mul(F3, q, (1, 1)), r) == (1, 2, 0, 1)
    assert len(r) < 2
    assert format_poly(F2, (1, 1, 1)) == "x^2 + x + 1"


@settings(max_examples=150, deadline=None)
@given(
    st.sampled_from([2, 3, 5, 7]),
    st.lists(st.integers(0, 6), max_size=7),
    st.lists(st.integers(0, 6), max_size=7),
)
def test_poly_arithmetic_against_sympy(p, f, g):
    F = field(p)
    f = tuple(c % p for c in f)
    g = tuple(c % p for c in g)
    assert asc(gf_mul(desc(f), desc(g), p, ZZ)) == poly_mul(F, f, g)
    if any(g):
        assert asc(gf_rem(desc(f), desc(g), p, ZZ)) == poly_mod(F, f, g)


@pytest.mark.parametrize("p,d", [(2, 1), (2, 2), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (5, 2)])
def test_irreducibility_against_sympy(p, d):
    F = field(p)
    got = set(enumerate_irreducibles(F, d))
    want = set()
    for tail in itertools.product(range(p), repeat=d):
        f = tail + (1,)
        if gf_irreducible_p(desc(f), p, ZZ):
            want.add(f)
    assert got == want
    assert len(got) == count_irreducibles(p, d)


def test_irreducible_examples():
    F2 = field(2)
    assert is_irreducible(F2, (1, 1, 1))
    assert not is_irreducible(F2, (1, 0, 1))
    for q in (2, 3, 4, 9):
        assert is_irreducible(field(q), (0, 1))
    assert enumerate_irreducibles(F2, 2, 10) == [(1, 1, 1)]
    assert enumerate_irreducibles(F2, 1, 10) == [(0, 1), (1, 1)]
    assert len(enumerate_irreducibles(F2, 4, 10)) == 3
    assert count_irreducibles(2, 1) == 2
    assert count_irreducibles(2, 3) == 2
    assert count_irreducibles(3, 2) == 3


def test_count_irreducibles_known_sequence():
    # number of binary irreducible polynomials of degree d, d = 1..10
    assert [count_irreducibles(2, d) for d in range(1, 11)] == [2, 1, 2, 3, 6, 9, 18, 30, 56, 99]


@pytest.mark.parametrize("q,d", [(4, 1), (4, 2), (4, 3), (9, 2)])
def test_count_over_prime_power_by_brute_force(q, d):
    F = field(q)
    assert len(enumerate_irreducibles(F, d)) == count_irreducibles(q, d)


@pytest.mark.parametrize("q,d", [(2, 4), (3, 3), (4, 2), (9, 2)])
def test_extension_is_a_field(q, d):
    F = field(q)
    K = extension(F, smallest_irreducible(F, d))
    els = list(K.elements())
    assert len(els) == q**d == K.order
    nonzero = [a for a in els if any(a)]
    for a in nonzero:
        assert K.mul(a, K.inv(a)) == K.one
        assert K.pow(a, q**d - 1) == K.one
    for a, b in itertools.islice(itertools.product(els, repeat=2), 3000):
        assert K.mul(a, b) == K.mul(b, a)


def test_extension_rejects_reducible_modulus():
    with pytest.raises(ValueError):
        ExtensionField(field(2), (1, 0, 1))


def test_tower_and_levels():
    T = FieldTower.default(4, 3)
    assert T.q == 4 and T.d == 3 and T.m == 2
    with pytest.raises(ValueError):
        FieldTower(2, (1, 0, 1))
    a = FieldElement(T.base, 2)
    b = FieldElement(T.ext, T.ext.basis(1))
    with pytest.raises(TypeError):
        a + b
    c = FieldElement(T.ext, (1, 2, 3))
    assert (c * c.inv()).value == T.ext.one
    assert (c - c).is_zero()
