"""Chudnovsky-type k-multiplication on the projective line.

To multiply x_1, ..., x_k in F_q[x]/(Q), deg Q = n:

1. lift each x_j to the polynomial g_j of degree <= n-1 (Ev_Q^{-1});
2. reduce every g_j at a set of places whose degrees sum to at least
   k(n-1)+1 (Ev_P);
3. multiply the k residues place by place (the Hadamard product), each with a
   smaller k-multiplication algorithm for F_q[x]/(P);
4. interpolate the unique h of degree <= k(n-1) with those residues
   (Ev_P^{-1}) and reduce it mod Q.

The residue products in step 3 are sub-multipliers: a rank-1 identity for
degree-1 places, a recursive build restricted to lower degrees, a hand-written
bilinear table, or the coordinate expansion.  ``flatten`` composes everything
into one explicit tensor decomposition over F_q.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import NamedTuple

from . import linalg, tensor
from .errors import ConfigurationError, PlanningError
from .field import (
    GF,
    ExtensionField,
    count_irreducibles,
    extension,
    field,
    irreducibles_cached,
    smallest_irreducible,
    trim,
)
from .funcfield import INFINITY, EvaluationSetup, Place, interpolate, make_setup, reduction_matrix
from .tensor import TensorDecomposition

MODES = ("recursive", "builtin", "naive")
BUILTIN_RANKS = {2: 3, 3: 6}  # k = 2 only


# ---------------------------------------------------------------------------
# Place selection
# ---------------------------------------------------------------------------


class DegreePlan(NamedTuple):
    cost: int
    total_degree: int
    degrees: tuple[int, ...]


def _supply(F: GF, i: int, n: int, use_infinity: bool) -> int:
    s = count_irreducibles(F.q, i)
    if i == n:
        s -= 1
    if i == 1 and use_infinity:
        s += 1
    return s


def plan_degrees(F: GF, n: int, k: int, mode: str, use_infinity: bool, max_degree: int):
    """Cheapest multiset of place degrees with sum >= k(n-1)+1, or None.

    Exact bounded knapsack over exact degree sums.  Keys are compared as
    (cost, degree sum, sorted degree tuple), which is the required tie order;
    processing degrees in ascending order keeps that order consistent across
    partial solutions with equal sums.
    """
    target = k * (n - 1) + 1
    r_max = min(max_degree, target)
    s_max = target + r_max - 1
    states = {0: (0, ())}
    best = None
    for i in range(1, r_max + 1):
        # a degree-i place costs at least i (its outputs must span F_{q^i})
        if best is not None and i > best[0]:
            break
        cap = min(_supply(F, i, n, use_infinity), -(-target // i))
        if cap <= 0:
            continue
        cost_i = estimated_rank(F, i, k, mode, use_infinity)
        new = dict(states)
        for s, (c, degs) in states.items():
            if s >= target:
                continue
            for j in range(1, cap + 1):
                ns = s + i * j
                if ns > s_max:
                    break
                cand = (c + j * cost_i, degs + (i,) * j)
                if best is not None and cand[0] > best[0]:
                    break
                cur = new.get(ns)
                if cur is None or cand < cur:
                    new[ns] = cand
        states = new
        done = [(c, s, d) for s, (c, d) in states.items() if s >= target]
        if done:
            best = min(done)
    if best is None:
        return None
    return DegreePlan(*best)


@functools.lru_cache(maxsize=None)
def sub_choice(F: GF, d: int, k: int, mode: str, use_infinity: bool) -> tuple[str, int]:
    """(construction, rank) used by sub_multiplier for residue fields of degree d."""
    if mode not in MODES:
        raise ConfigurationError(f"unknown mode {mode!r}")
    if d == 1:
        return "trivial", 1
    cands = []
    if mode == "recursive":
        plan = plan_degrees(F, d, k, mode, use_infinity, max_degree=d - 1)
        if plan is not None:
            cands.append((plan.cost, 0, "recursive"))
    if mode in ("recursive", "builtin") and k == 2 and d in BUILTIN_RANKS:
        cands.append((BUILTIN_RANKS[d], 1, "builtin"))
    cands.append((d**k, 2, "naive"))
    cost, _, kind = min(cands)
    return kind, cost


def estimated_rank(F: GF, d: int, k: int, mode: str = "recursive", use_infinity: bool = True) -> int:
    return sub_choice(F, d, k, mode, use_infinity)[1]


@dataclass(frozen=True)
class AlgorithmPlan:
    F: GF
    n: int
    k: int
    Q: Place
    places: tuple[Place, ...]
    target: int
    cost: int
    mode: str
    use_infinity: bool
    max_degree: int

    @property
    def multiplicity(self) -> int:
        return self.n - 1

    @property
    def total_degree(self) -> int:
        return sum(P.degree for P in self.places)

    @property
    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for P in self.places:
            out[P.degree] = out.get(P.degree, 0) + 1
        return dict(sorted(out.items()))

    @property
    def largest_degree(self) -> int:
        return max((P.degree for P in self.places), default=0)


def _places_of_degree(F: GF, i: int, count: int, exclude: tuple[int, ...], use_infinity: bool):
    polys = [f for f in irreducibles_cached(F, i, count + 1) if f != exclude][:count]
    out = [Place(f) for f in polys]
    if i == 1 and use_infinity and len(out) < count:
        out.append(INFINITY)
    if len(out) < count:
        raise PlanningError(f"not enough places of degree {i}")
    return out


def choose_places(
    F: GF,
    n: int,
    k: int,
    mode: str = "recursive",
    use_infinity: bool = True,
    Q=None,
    max_degree: int | None = None,
) -> AlgorithmPlan:
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    Q = Place(tuple(Q)) if Q is not None else Place(smallest_irreducible(F, n))
    target = k * (n - 1) + 1
    if max_degree is None:
        max_degree = target
    dp = plan_degrees(F, n, k, mode, use_infinity, max_degree)
    if dp is None:
        raise PlanningError(f"no place multiset of degree <= {max_degree} reaches {target}")
    places = []
    for i in sorted(set(dp.degrees)):
        places.extend(_places_of_degree(F, i, dp.degrees.count(i), Q.poly, use_infinity))
    return AlgorithmPlan(F, n, k, Q, tuple(places), target, dp.cost, mode, use_infinity, max_degree)


# ---------------------------------------------------------------------------
# Sub-multipliers
# ---------------------------------------------------------------------------


def _check(dec: TensorDecomposition, what: str) -> TensorDecomposition:
    try:
        ok = tensor.verify(dec)
    except tensor.CapacityError:
        ok = tensor.verify_random(dec, 200, random.Random(0))
    if not ok:
        raise RuntimeError(f"{what} failed verification")
    return dec


@functools.lru_cache(maxsize=None)
def sub_multiplier(
    F: GF, modulus: tuple[int, ...] | None, k: int, mode: str = "recursive", use_infinity: bool = True
) -> TensorDecomposition:
    """Verified k-multilinear decomposition for F_q[x]/(modulus) over F_q.

    ``modulus=None`` stands for the infinite place (residue field F_q).
    """
    if modulus is None:
        modulus = (0, 1)
    modulus = trim(modulus)
    d = len(modulus) - 1
    kind, expected = sub_choice(F, d, k, mode, use_infinity)
    if kind == "trivial":
        dec = tensor.trivial_decomposition(F, modulus, k)
    elif kind == "recursive":
        alg = build(F, d, k, mode, use_infinity, Q=modulus, max_degree=d - 1)
        dec = flatten(alg, check=False)
    elif kind == "builtin":
        dec = (tensor.karatsuba_decomposition if d == 2 else tensor.six_term_decomposition)(F, modulus)
    else:
        dec = tensor.naive_decomposition(F, modulus, k)
    assert dec.rank == expected, (kind, dec.rank, expected)
    return _check(dec, f"{kind} sub-multiplier of degree {d}")


# ---------------------------------------------------------------------------
# Algorithms
# ---------------------------------------------------------------------------


class CostReport(NamedTuple):
    rank: int
    nu_count: int
    breakdown: tuple[tuple[int, int, int, int], ...]  # (degree, N_i, s_i, b_i)


@dataclass(frozen=True)
class KMulAlgorithm:
    plan: AlgorithmPlan
    setup: EvaluationSetup | None  # None for n = 1
    subs: tuple[TensorDecomposition, ...]

    @property
    def F(self) -> GF:
        return self.plan.F

    @property
    def n(self) -> int:
        return self.plan.n

    @property
    def k(self) -> int:
        return self.plan.k

    @property
    def Q(self) -> tuple[int, ...]:
        return self.plan.Q.poly

    @property
    def ext(self) -> ExtensionField:
        return extension(self.F, self.Q)

    @property
    def places(self) -> tuple[Place, ...]:
        return self.plan.places

    def bilinear_subs(self) -> tuple[TensorDecomposition, ...]:
        return tuple(
            sub_multiplier(self.F, P.poly, 2, self.plan.mode, self.plan.use_infinity)
            for P in self.places
        )

    def cost_report(self) -> CostReport:
        if self.setup is None:
            return CostReport(1, self.k - 1, ((1, 1, 1, 1),))
        rows: dict[int, list[int]] = {}
        for dec, bil in zip(self.subs, self.bilinear_subs()):
            row = rows.setdefault(dec.n, [0, dec.rank, bil.rank])
            assert row[1:] == [dec.rank, bil.rank]
            row[0] += 1
        breakdown = tuple((d, *rows[d]) for d in sorted(rows))
        rank = sum(N * s for _, N, s, _ in breakdown)
        nu = (self.k - 1) * sum(N * b for _, N, _, b in breakdown)
        return CostReport(rank, nu, breakdown)

    @property
    def rank(self) -> int:
        return sum(d.rank for d in self.subs)


def build(
    F: GF,
    n: int,
    k: int,
    mode: str = "recursive",
    use_infinity: bool = True,
    Q=None,
    max_degree: int | None = None,
) -> KMulAlgorithm:
    if mode not in MODES:
        raise ConfigurationError(f"unknown mode {mode!r}")
    if n == 1:
        Qp = Place(tuple(Q)) if Q is not None else Place(smallest_irreducible(F, 1))
        plan = AlgorithmPlan(F, 1, k, Qp, (), 1, 1, mode, use_infinity, 0)
        return KMulAlgorithm(plan, None, (tensor.trivial_decomposition(F, Qp.poly, k),))
    plan = choose_places(F, n, k, mode, use_infinity, Q, max_degree)
    setup = make_setup(F, plan.Q, plan.places, k)
    subs = tuple(sub_multiplier(F, P.poly, k, mode, use_infinity) for P in plan.places)
    return KMulAlgorithm(plan, setup, subs)


def direct_product(K: ExtensionField, xs):
    return tensor.direct_product(K, xs)


def run(alg: KMulAlgorithm, xs, costing: str = "mu", stats: dict | None = None):
    """Multiply k elements of F_q[x]/(Q) with the algorithm.

    ``costing="mu"`` multiplies the k residues at each place with the
    k-multilinear sub-multiplier; ``costing="nu"`` chains k-1 bilinear
    products instead.  ``stats`` (if given) accumulates the number of
    multilinear summands or bilinear multiplications performed.
    """
    xs = [tuple(x) for x in xs]
    k, F = alg.k, alg.F
    if len(xs) != k or any(len(x) != alg.n for x in xs):
        raise ValueError(f"run expects {k} elements of length {alg.n}")
    if costing not in ("mu", "nu"):
        raise ValueError("costing must be 'mu' or 'nu'")
    count = 0
    if alg.setup is None:
        acc = 1
        for x in xs:
            acc = F.mul(acc, x[0])
        count = 1 if costing == "mu" else k - 1
        result = (acc,)
    else:
        setup = alg.setup
        residues = [setup.residues(x) for x in xs]
        bil = alg.bilinear_subs() if costing == "nu" else None
        values = []
        for p in range(len(setup.places)):
            args = [residues[j][p] for j in range(k)]
            if costing == "mu":
                dec = alg.subs[p]
                values.append(tensor.apply(dec, args))
                count += dec.rank
            else:
                dec = bil[p]
                acc = args[0]
                for a in args[1:]:
                    acc = tensor.apply(dec, [acc, a])
                    count += dec.rank
                values.append(acc)
        h = interpolate(setup, values)
        result = alg.ext.from_poly(h)
    if stats is not None:
        stats[costing] = stats.get(costing, 0) + count
    return result


def flatten(alg: KMulAlgorithm, check: bool = True) -> TensorDecomposition:
    """Explicit decomposition of the whole algorithm over F_q."""
    F, k, n = alg.F, alg.k, alg.n
    if alg.setup is None:
        return alg.subs[0]
    setup = alg.setup
    # R_Q * L: from stacked residue coordinates to coordinates mod Q
    red = reduction_matrix(F, alg.Q, setup.product_multiplicity)
    RL = linalg.matmul(F, red, setup.ev_p_left)
    terms = []
    for P, off, block, dec in zip(setup.places, setup.offsets(), setup.input_blocks, alg.subs):
        W = [row[off : off + P.degree] for row in RL]
        for t in dec.terms:
            forms = [linalg.vecmat(F, f, block) for f in t.forms]
            out = linalg.matvec(F, W, t.output)
            terms.append((forms, out))
    dec = tensor.make_decomposition(F, alg.Q, k, terms)
    if check:
        _check(dec, f"flattened algorithm for n={n}, k={k}")
    return dec


class SymmetryReport(NamedTuple):
    symmetric: bool
    contradiction: bool
    advisory: str


def symmetric_check(dec: TensorDecomposition) -> SymmetryReport:
    sym = tensor.is_symmetric(dec)
    bad = sym and dec.n > 1 and dec.k > dec.q
    if bad:
        note = "symmetric with n > 1 and k > q: impossible, the decomposition is wrong"
    elif dec.n > 1 and dec.k > dec.q:
        note = "k > q: no symmetric decomposition exists for n > 1"
    else:
        note = "symmetric decompositions exist for n > 1 only when k <= q"
    return SymmetryReport(sym, bad, note)


# ---------------------------------------------------------------------------
# Best witnesses and tower composition
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def best_decomposition(
    F: GF, modulus: tuple[int, ...], k: int, mode: str = "recursive", use_infinity: bool = True
) -> TensorDecomposition:
    """Smaller of the sub-multiplier and the full build for this modulus."""
    modulus = trim(modulus)
    d = len(modulus) - 1
    sub = sub_multiplier(F, modulus, k, mode, use_infinity)
    if d == 1:
        return sub
    full = flatten(build(F, d, k, mode, use_infinity, Q=modulus))
    return full if full.rank < sub.rank else sub


def mu_witness(F: GF, d: int, k: int, mode: str = "recursive", use_infinity: bool = True) -> int:
    return best_decomposition(F, smallest_irreducible(F, d), k, mode, use_infinity).rank


def _find_root(T: ExtensionField, K: GF, poly) -> tuple:
    # coefficients of poly live in the prime field, which K contains as labels < p
    for a in T.elements():
        acc = T.zero
        for c in reversed(poly):
            acc = T.add(T.mul(acc, a), T.embed(c))
        if not any(acc):
            return a
    raise RuntimeError("no root found")


def compose_tower(
    F: GF,
    n: int,
    m: int,
    k: int,
    mode: str = "recursive",
    use_infinity: bool = True,
    modulus=None,
) -> TensorDecomposition:
    """Decomposition for F_{p^{nm}} over F_p from one over F_{p^n} of degree m.

    Each term of the outer decomposition (over K = F_{p^n}) is expanded with
    the inner decomposition of K over F_p, so the rank is the product of the
    two ranks.  The result is transported to the power basis of ``modulus``
    (default: the smallest irreducible of degree nm) through a root of that
    modulus in K[y]/(R).  Requires a prime base field.
    """
    if F.m != 1:
        raise ConfigurationError("tower composition needs a prime base field")
    p = F.p
    if p ** (n * m) > 1 << 16:
        raise ConfigurationError("tower composition is limited to fields of size <= 2^16")
    K = field(p**n)
    inner = best_decomposition(F, K.modulus, k, mode, use_infinity)
    R = smallest_irreducible(K, m)
    outer = best_decomposition(K, R, k, mode, use_infinity)
    N = n * m
    basis_labels = [p**a for a in range(n)]

    def digits_of(tvec):
        return [c for comp in tvec for c in K.digits(comp)]

    terms = []
    for ot in outer.terms:
        # F_p-matrices of y -> alpha_i * y for each coefficient of each outer form
        for it in inner.terms:
            forms = []
            for j in range(k):
                alpha, b = ot.forms[j], it.forms[j]
                row = []
                for i in range(m):
                    for a in range(n):
                        row.append(tensor._dot(F, b, K.digits(K.mul(alpha[i], basis_labels[a]))))
                forms.append(row)
            e = K.from_digits(it.output)
            out = digits_of([K.mul(e, c) for c in ot.output])
            terms.append((forms, out))
    target = trim(modulus) if modulus is not None else smallest_irreducible(F, N)
    T = ExtensionField(K, R, check=False)
    alpha = _find_root(T, K, target)
    cols = [digits_of(T.pow(alpha, i)) for i in range(N)]
    Phi = linalg.transpose(cols)
    Phi_inv = linalg.inverse(F, Phi)
    moved = []
    for forms, out in terms:
        moved.append(([linalg.vecmat(F, f, Phi) for f in forms], linalg.matvec(F, Phi_inv, out)))
    dec = tensor.make_decomposition(F, target, k, moved)
    return _check(dec, "tower composition")
