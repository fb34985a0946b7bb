import itertools
import random

import pytest
from sympy import GF as SymGF
from sympy.polys.galoistools import gf_rem

from kmul import tensor
from kmul.errors import CapacityError
from kmul.field import extension, field, smallest_irreducible
from kmul.tensor import (
    Term,
    TensorDecomposition,
    apply,
    direct_product,
    is_symmetric,
    karatsuba_decomposition,
    make_decomposition,
    naive_decomposition,
    permute_slots,
    six_term_decomposition,
    structure_constants,
    trivial_decomposition,
    verify,
    verify_random,
)

ZZ = SymGF(2).dom
F2 = field(2)
F4_MOD = (1, 1, 1)


def test_structure_constants_example():
    t = structure_constants(F2, F4_MOD)
    assert t[1][1] == (1, 1)
    for j in range(2):
        assert t[0][j] == tuple(int(h == j) for h in range(2))


@pytest.mark.parametrize("p,n", [(2, 3), (2, 5), (3, 4), (5, 3), (7, 2)])
def test_structure_constants_against_sympy(p, n):
    F = field(p)
    Q = smallest_irreducible(F, n)
    t = structure_constants(F, Q)
    desc_Q = list(reversed(Q))
    for i, j in itertools.product(range(n), repeat=2):
        mono = [1] + [0] * (i + j)
        r = list(reversed(gf_rem(mono, desc_Q, p, ZZ)))
        assert t[i][j] == tuple(r + [0] * (n - len(r)))
        assert t[i][j] == t[j][i]


def test_karatsuba():
    dec = karatsuba_decomposition(F2, F4_MOD)
    assert dec.rank == 3 and is_symmetric(dec) and verify(dec)
    assert apply(dec, [(0, 1), (0, 1)]) == (1, 1)
    assert apply(dec, [(1, 0), (1, 0)]) == (1, 0)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 9])
def test_builtin_tables_every_characteristic(q):
    F = field(q)
    assert verify(karatsuba_decomposition(F, smallest_irreducible(F, 2)))
    assert verify(six_term_decomposition(F, smallest_irreducible(F, 3)))


def test_corruption_detected():
    dec = karatsuba_decomposition(F2, F4_MOD)
    t0 = dec.terms[0]
    bad = TensorDecomposition(
        dec.F, dec.modulus, 2, (Term(t0.forms, (t0.output[0] ^ 1, t0.output[1])),) + dec.terms[1:]
    )
    assert not verify(bad)
    assert tensor.find_mismatch(bad) is not None


@pytest.mark.parametrize("q,n,k", [(2, 3, 2), (3, 2, 3), (4, 2, 2), (2, 2, 4)])
def test_naive_is_exact(q, n, k):
    F = field(q)
    dec = naive_decomposition(F, smallest_irreducible(F, n), k)
    assert dec.rank == n**k and verify(dec)


def test_trivial_and_empty():
    F5 = field(5)
    dec = trivial_decomposition(F5, (0, 1), 3)
    assert dec.rank == 1 and is_symmetric(dec) and verify(dec)
    assert apply(dec, [(2,), (3,), (4,)]) == (4,)
    empty = make_decomposition(F2, F4_MOD, 2, [])
    assert empty.rank == 0 and not verify(empty)


def test_apply_matches_direct_product_exhaustively():
    F = field(3)
    Q = smallest_irreducible(F, 2)
    K = extension(F, Q)
    dec = karatsuba_decomposition(F, Q)
    for xs in itertools.product(list(K.elements()), repeat=2):
        assert apply(dec, xs) == direct_product(K, xs)
    assert apply(dec, [K.one, K.one]) == K.one


def test_direct_product_examples():
    K = extension(F2, F4_MOD)
    t = (0, 1)
    assert direct_product(K, [K.one, t]) == t
    assert direct_product(K, [t, t]) == (1, 1)
    assert direct_product(K, [t, t, t]) == (1, 0)


def test_permuted_slots_not_symmetric():
    dec = karatsuba_decomposition(F2, F4_MOD)
    t = dec.terms[0]
    skew = TensorDecomposition(dec.F, dec.modulus, 2, (Term((t.forms[0], (0, 1)), t.output),) + dec.terms[1:])
    assert not is_symmetric(skew)
    n3 = naive_decomposition(F2, F4_MOD, 2)
    assert verify(permute_slots(n3, (1, 0)))
    with pytest.raises(ValueError):
        permute_slots(n3, (0, 0))


def test_budget_and_sampling():
    F = field(2)
    dec = naive_decomposition(F, smallest_irreducible(F, 3), 3)
    with pytest.raises(CapacityError):
        verify(dec, budget=10)
    assert verify_random(dec, 50, random.Random(1))


def test_shape_validation():
    with pytest.raises(ValueError):
        make_decomposition(F2, F4_MOD, 2, [([(1, 0)], (1, 0))])
    with pytest.raises(ValueError):
        apply(karatsuba_decomposition(F2, F4_MOD), [(1, 0)])
