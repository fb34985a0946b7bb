"""Tensor decompositions of the k-fold multiplication of F_q[x]/(Q) over F_q.

A decomposition is a list of terms; each term holds k linear forms (row
vectors of length n over F_q) and one output vector (length n).  It encodes

    x_1 * ... * x_k = sum_t (prod_j <form_{t,j}, x_j>) * output_t.

``verify`` checks this identity on every tuple of basis vectors against the
structure constants of the power basis, which by multilinearity proves it for
all inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CapacityError
from .field import GF, ExtensionField, extension, trim

DEFAULT_BUDGET = 10**6


class Term(NamedTuple):
    forms: tuple[tuple[int, ...], ...]
    output: tuple[int, ...]


@dataclass(frozen=True)
class TensorDecomposition:
    F: GF
    modulus: tuple[int, ...]
    k: int
    terms: tuple[Term, ...]

    def __post_init__(self):
        n = len(self.modulus) - 1
        for t in self.terms:
            if len(t.forms) != self.k:
                raise ValueError("every term needs exactly k forms")
            if len(t.output) != n or any(len(f) != n for f in t.forms):
                raise ValueError("form and output vectors must have length n")

    @property
    def n(self) -> int:
        return len(self.modulus) - 1

    @property
    def q(self) -> int:
        return self.F.q

    @property
    def rank(self) -> int:
        return len(self.terms)

    @property
    def ext(self) -> ExtensionField:
        return extension(self.F, self.modulus)


def make_decomposition(F: GF, modulus, k: int, terms) -> TensorDecomposition:
    terms = tuple(
        Term(tuple(tuple(int(c) for c in f) for f in forms), tuple(int(c) for c in out))
        for forms, out in terms
    )
    return TensorDecomposition(F, tuple(modulus), k, terms)


def rank(dec: TensorDecomposition) -> int:
    return dec.rank


def is_symmetric(dec: TensorDecomposition) -> bool:
    return all(all(f == t.forms[0] for f in t.forms) for t in dec.terms)


def structure_constants(F: GF, Q) -> tuple:
    """t[i][j][h] with e_i e_j = sum_h t[i][j][h] e_h in F_q[x]/(Q) (0-based)."""
    K = extension(F, tuple(Q))
    n = K.d
    return tuple(
        tuple(K.from_poly((0,) * (i + j) + (1,)) for j in range(n)) for i in range(n)
    )


def direct_product(K: ExtensionField, xs):
    """Schoolbook product of the inputs; the correctness oracle."""
    acc = K.one
    for x in xs:
        acc = K.mul(acc, tuple(x))
    return acc


def _dot(F: GF, form, x) -> int:
    add, mul = F.add_table, F.mul_table
    acc = 0
    for a, b in zip(form, x):
        if a and b:
            acc = add[acc][mul[a][b]]
    return acc


def apply(dec: TensorDecomposition, xs) -> tuple[int, ...]:
    xs = [tuple(x) for x in xs]
    if len(xs) != dec.k or any(len(x) != dec.n for x in xs):
        raise ValueError(f"apply expects {dec.k} vectors of length {dec.n}")
    F = dec.F
    add, mul = F.add_table, F.mul_table
    out = [0] * dec.n
    for t in dec.terms:
        c = 1
        for form, x in zip(t.forms, xs):
            c = mul[c][_dot(F, form, x)]
            if not c:
                break
        if c:
            row = mul[c]
            for h, o in enumerate(t.output):
                if o:
                    out[h] = add[out[h]][row[o]]
    return tuple(out)


def find_mismatch(dec: TensorDecomposition, budget: int = DEFAULT_BUDGET):
    """First basis tuple (0-based indices) where the decomposition is wrong, or None."""
    n, k = dec.n, dec.k
    if n**k > budget:
        raise CapacityError(f"{n}^{k} basis tuples exceed the budget of {budget}")
    F = dec.F
    add = np.asarray(F.add_table, dtype=np.int32)
    mul = np.asarray(F.mul_table, dtype=np.int32)
    K = dec.ext
    powers = np.asarray(
        [K.from_poly((0,) * s + (1,)) for s in range(k * (n - 1) + 1)], dtype=np.int32
    )
    forms = np.asarray([t.forms for t in dec.terms], dtype=np.int32).reshape(len(dec.terms), k, n)
    outputs = np.asarray([t.output for t in dec.terms], dtype=np.int32).reshape(len(dec.terms), n)
    rest = (n,) * (k - 1)
    rest_sum = np.indices(rest).sum(axis=0) if k > 1 else np.zeros((), dtype=np.int64)
    # chunk the first slot so the accumulator stays small
    chunk = max(1, 4_000_000 // max(1, n**k))
    for start in range(0, n, chunk):
        idx0 = np.arange(start, min(n, start + chunk))
        c = len(idx0)
        grid = idx0.reshape((c,) + (1,) * (k - 1)) + rest_sum
        expected = powers[grid]
        acc = np.zeros(expected.shape, dtype=np.int32)
        for t in range(len(dec.terms)):
            prod = forms[t, 0, idx0].reshape((c,) + (1,) * (k - 1))
            for j in range(1, k):
                shape = [1] * k
                shape[j] = n
                prod = mul[prod, forms[t, j].reshape(shape)]
            acc = add[acc, mul[prod[..., None], outputs[t]]]
        bad = np.any(acc != expected, axis=-1)
        if bad.any():
            hit = np.argwhere(bad)[0]
            return (int(idx0[hit[0]]),) + tuple(int(h) for h in hit[1:])
    return None


def verify(dec: TensorDecomposition, budget: int = DEFAULT_BUDGET) -> bool:
    """Exhaustive check on all n^k basis tuples."""
    return find_mismatch(dec, budget) is None


def verify_random(dec: TensorDecomposition, samples: int, rng) -> bool:
    """Probabilistic check on random input tuples (for decompositions over budget)."""
    K = dec.ext
    for _ in range(samples):
        xs = [K.random(rng) for _ in range(dec.k)]
        if apply(dec, xs) != direct_product(K, xs):
            return False
    return True


def permute_slots(dec: TensorDecomposition, perm) -> TensorDecomposition:
    perm = tuple(perm)
    if sorted(perm) != list(range(dec.k)):
        raise ValueError("not a permutation of the slots")
    terms = tuple(Term(tuple(t.forms[p] for p in perm), t.output) for t in dec.terms)
    return TensorDecomposition(dec.F, dec.modulus, dec.k, terms)


# ---------------------------------------------------------------------------
# Stock decompositions
# ---------------------------------------------------------------------------


def trivial_decomposition(F: GF, modulus, k: int) -> TensorDecomposition:
    """Rank 1 for a degree-1 modulus: all forms and the output are the identity."""
    modulus = trim(modulus)
    if len(modulus) != 2:
        raise ValueError("trivial decomposition needs a degree-1 modulus")
    return make_decomposition(F, modulus, k, [([(1,)] * k, (1,))])


def naive_decomposition(F: GF, modulus, k: int) -> TensorDecomposition:
    """Coordinate expansion: one term per index tuple, rank n^k."""
    K = extension(F, tuple(modulus))
    n = K.d
    unit = [K.basis(i) for i in range(n)]
    terms = []
    for idx in itertools.product(range(n), repeat=k):
        terms.append(([unit[i] for i in idx], K.from_poly((0,) * sum(idx) + (1,))))
    return make_decomposition(F, modulus, k, terms)


def _from_polynomial_product(F: GF, modulus, pairs, coeffs) -> TensorDecomposition:
    # pairs[t] = (form_a, form_b); coeffs[t][s] = integer weight of x^s in the product
    K = extension(F, tuple(modulus))
    neg_one = F.neg(1)
    terms = []
    for (fa, fb), weights in zip(pairs, coeffs):
        out = K.zero
        for s, w in enumerate(weights):
            if w:
                c = 1 if w == 1 else neg_one
                out = K.add(out, K.scale(c, K.from_poly((0,) * s + (1,))))
        terms.append(([fa, fb], out))
    return make_decomposition(F, modulus, 2, terms)


def karatsuba_decomposition(F: GF, modulus) -> TensorDecomposition:
    """Rank 3 for a degree-2 modulus: a0b0, a1b1, (a0+a1)(b0+b1)."""
    if len(trim(modulus)) != 3:
        raise ValueError("Karatsuba needs a degree-2 modulus")
    pairs = [((1, 0), (1, 0)), ((0, 1), (0, 1)), ((1, 1), (1, 1))]
    coeffs = [(1, -1, 0), (0, -1, 1), (0, 1, 0)]
    return _from_polynomial_product(F, modulus, pairs, coeffs)


def six_term_decomposition(F: GF, modulus) -> TensorDecomposition:
    """Rank 6 for a degree-3 modulus (three-term Karatsuba)."""
    if len(trim(modulus)) != 4:
        raise ValueError("needs a degree-3 modulus")
    e0, e1, e2 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    s01, s02, s12 = (1, 1, 0), (1, 0, 1), (0, 1, 1)
    pairs = [(e0, e0), (e1, e1), (e2, e2), (s01, s01), (s02, s02), (s12, s12)]
    coeffs = [
        (1, -1, -1, 0, 0),
        (0, -1, 1, -1, 0),
        (0, 0, -1, -1, 1),
        (0, 1, 0, 0, 0),
        (0, 0, 1, 0, 0),
        (0, 0, 0, 1, 0),
    ]
    return _from_polynomial_product(F, modulus, pairs, coeffs)
