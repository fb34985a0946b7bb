import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmul import bounds, builder, tensor
from kmul.builder import (
    build,
    choose_places,
    flatten,
    plan_degrees,
    run,
    sub_choice,
    sub_multiplier,
    symmetric_check,
)
from kmul.errors import ConfigurationError
from kmul.field import count_irreducibles, extension, field, smallest_irreducible

F2, F5 = field(2), field(5)


def brute_force_cost(F, n, k, mode, use_infinity):
    """Cheapest degree multiset by exhaustive enumeration (independent of the DP)."""
    target = k * (n - 1) + 1
    degs = range(1, target + 1)
    supply = {
        i: count_irreducibles(F.q, i) - (i == n) + (i == 1 and use_infinity) for i in degs
    }
    cost = {i: sub_choice(F, i, k, mode, use_infinity)[1] for i in degs}
    best = None

    def rec(i, s, c):
        nonlocal best
        if s >= target:
            best = c if best is None else min(best, c)
            return
        if i > target:
            return
        for j in range(0, min(supply[i], -(-(target - s) // i)) + 1):
            rec(i + 1, s + i * j, c + j * cost[i])

    rec(1, 0, 0)
    return best


def test_plan_examples():
    p = choose_places(F5, 2, 2)
    assert [P.label() for P in p.places] == ["01", "11", "21"]
    p = choose_places(F2, 3, 2, use_infinity=False)
    assert p.counts == {1: 2, 3: 1} and p.target == 5
    assert plan_degrees(F2, 1, 2, "recursive", True, 1).degrees == (1,)


@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("inf", [True, False])
def test_plan_cost_is_optimal(q, k, inf):
    F = field(q)
    for n in range(2, 7):
        plan = choose_places(F, n, k, use_infinity=inf)
        assert plan.cost == brute_force_cost(F, n, k, "recursive", inf)
        assert plan.total_degree >= k * (n - 1) + 1
        for d, N in plan.counts.items():
            assert N <= count_irreducibles(q, d) - (d == n) + (d == 1 and inf)


def test_sub_multiplier_examples():
    assert sub_multiplier(F2, (0, 1), 4).rank == 1
    assert sub_multiplier(F2, (1, 1, 1), 2, "builtin").rank == 3
    assert sub_multiplier(F2, (1, 1, 1), 2, "naive").rank == 4
    assert sub_multiplier(F2, None, 3).rank == 1
    with pytest.raises(ConfigurationError):
        sub_choice(F2, 2, 2, "clever", True)


def test_build_examples():
    a = build(F5, 2, 2)
    assert a.rank == 3 == a.cost_report().rank
    a = build(F2, 3, 2, use_infinity=False)
    rep = a.cost_report()
    assert a.rank == 8 and rep.breakdown == ((1, 2, 1, 1), (3, 1, 6, 6))
    a = build(F2, 2, 3)
    assert a.plan.total_degree >= 4
    K = a.ext
    for xs in itertools.product(list(K.elements()), repeat=3):
        assert run(a, xs) == tensor.direct_product(K, xs)


def test_run_examples():
    a = build(F2, 2, 2)
    K = a.ext
    assert run(a, [K.one, K.one]) == K.one
    assert run(a, [K.zero, (1, 1)]) == K.zero
    for xs in itertools.product(list(K.elements()), repeat=2):
        assert run(a, xs) == tensor.direct_product(K, xs)
    with pytest.raises(ValueError):
        run(a, [K.one])
    with pytest.raises(ValueError):
        run(a, [K.one, K.one], costing="lambda")


def test_costing_modes_agree_and_count(rng):
    a = build(field(3), 4, 3)
    K = a.ext
    rep = a.cost_report()
    stats = {}
    for _ in range(30):
        xs = [K.random(rng) for _ in range(3)]
        r1 = run(a, xs, "mu", stats)
        r2 = run(a, xs, "nu", stats)
        assert r1 == r2 == tensor.direct_product(K, xs)
    assert stats == {"mu": 30 * rep.rank, "nu": 30 * rep.nu_count}
    stats = {}
    run(a, [K.one] * 3, "mu", stats)
    run(a, [K.one] * 3, "nu", stats)
    assert stats == {"mu": rep.rank, "nu": rep.nu_count}
    assert rep.nu_count == 2 * sum(N * b for _, N, _, b in rep.breakdown)


def test_n1_short_circuit():
    a = build(F2, 1, 4)
    assert a.rank == 1 and a.cost_report().nu_count == 3
    dec = flatten(a)
    assert dec.rank == 1 and dec.terms[0].forms == ((1,),) * 4


def test_flatten_matches_run(rng):
    a = build(field(4), 3, 2)
    dec = flatten(a)
    K = a.ext
    assert dec.rank == a.cost_report().rank
    for _ in range(1000):
        xs = [K.random(rng) for _ in range(2)]
        assert tensor.apply(dec, xs) == run(a, xs)


def test_symmetric_check():
    assert symmetric_check(flatten(build(F2, 1, 3))).symmetric
    assert symmetric_check(tensor.karatsuba_decomposition(F2, (1, 1, 1))).symmetric
    rep = symmetric_check(flatten(build(F2, 2, 3)))
    assert not rep.contradiction


@pytest.mark.parametrize("q", [2, 3, 4, 5])
@pytest.mark.parametrize("k", [2, 3])
def test_genus0_bound_witness(q, k):
    F = field(q)
    for n in range(2, 8):
        a = build(F, n, k)
        assert a.rank <= bounds.genus0_bound(a)


def test_k2_nu_equals_mu():
    for n in range(2, 9):
        rep = build(F2, n, 2).cost_report()
        assert rep.nu_count == rep.rank


def test_small_degree_behaviour():
    # q=2, n=2, k=2 without the infinite place cannot use 3 rational places
    assert build(F2, 2, 2, use_infinity=False).rank == 6
    assert build(F2, 2, 2).rank == 3


def test_compose_tower():
    dec = builder.compose_tower(F2, 2, 2, 2)
    assert dec.rank == 9 and tensor.verify(dec)
    assert dec.modulus == smallest_irreducible(F2, 4)
    with pytest.raises(ConfigurationError):
        builder.compose_tower(field(4), 2, 2, 2)


def test_bad_arguments():
    with pytest.raises(ConfigurationError):
        build(F2, 3, 2, mode="fast")
    with pytest.raises(ValueError):
        choose_places(F2, 0, 2)
    with pytest.raises(ValueError):
        choose_places(F2, 3, 1)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 7]), st.integers(1, 6), st.integers(2, 4), st.integers(0, 10**6))
def test_random_instances_match_oracle(q, n, k, seed):
    F = field(q)
    a = build(F, n, k)
    K = a.ext
    rng = random.Random(seed)
    for _ in range(5):
        xs = [K.random(rng) for _ in range(k)]
        assert run(a, xs) == tensor.direct_product(K, xs)
    assert a.ext == extension(F, smallest_irreducible(F, n))
