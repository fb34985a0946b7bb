"""The rational function field F_q(x): places, Riemann-Roch spaces of m*P_inf,
evaluation maps and interpolation.

A finite place is a monic irreducible polynomial P; its residue field
F_q[x]/(P) is represented in the power basis of x.  The divisor carrying the
Riemann-Roch spaces is always a multiple m*P_inf of the infinite place, so
L(m*P_inf) is the space of polynomials of degree <= m and the evaluation map
at the degree-n place Q is the identity on coefficient vectors.

The infinite place may still be used as an evaluation place.  For f in
L(m*P_inf) its value there is the value of f / x^m at infinity, i.e. the
coefficient of x^m.  This is evaluation after moving the divisor to a linearly
equivalent one supported away from P_inf, and the value of a product is the
product of the values, which is all the algorithm needs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field

from . import linalg
from .errors import InterpolationError, SetupError, UnsupportedPlaceError
from .field import GF, ExtensionField, extension, is_irreducible, poly_mod, trim


@dataclass(frozen=True)
class Place:
    """A closed point of the projective line over F_q.

    ``poly`` is the monic irreducible polynomial of a finite place, or None for
    the infinite place.
    """

    poly: tuple[int, ...] | None = None

    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else len(self.poly) - 1

    def label(self) -> str:
        return "inf" if self.poly is None else "".join(str(c) for c in self.poly)

    @classmethod
    def finite(cls, F: GF, poly) -> "Place":
        poly = trim(poly)
        if len(poly) < 2 or poly[-1] != 1 or not is_irreducible(F, poly):
            raise SetupError(f"{poly} is not a monic irreducible polynomial")
        return cls(poly)


INFINITY = Place(None)


@dataclass(frozen=True)
class InfinityDivisor:
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 0:
            raise ValueError("multiplicity must be non-negative")

    @property
    def degree(self) -> int:
        return self.multiplicity

    def support(self) -> tuple[Place, ...]:
        return (INFINITY,) if self.multiplicity > 0 else ()

    def scaled(self, k: int) -> "InfinityDivisor":
        return InfinityDivisor(k * self.multiplicity)


@dataclass(frozen=True)
class RRSpace:
    """L(m*P_inf) on the projective line: polynomials of degree <= m."""

    multiplicity: int

    @property
    def dimension(self) -> int:
        return max(self.multiplicity + 1, 0)

    @property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        return tuple((0,) * i + (1,) for i in range(self.dimension))

    def __contains__(self, f) -> bool:
        return len(trim(f)) - 1 <= self.multiplicity


def rr_basis(m: int) -> RRSpace:
    return RRSpace(m)


def residue_field(F: GF, P: Place) -> ExtensionField:
    return extension(F, (0, 1) if P.is_infinite else P.poly)


def evaluate(F: GF, f, P: Place, multiplicity: int | None = None) -> tuple[int, ...]:
    """f(P) as coordinates in the power basis of F_q[x]/(P).

    At the infinite place the divisor multiplicity must be supplied; the
    result is the coefficient of x^multiplicity.
    """
    f = trim(f)
    if P.is_infinite:
        if multiplicity is None:
            raise UnsupportedPlaceError("evaluation at P_inf needs the divisor multiplicity")
        if len(f) - 1 > multiplicity:
            raise UnsupportedPlaceError("function has a pole at P_inf beyond the divisor")
        return (f[multiplicity] if len(f) > multiplicity else 0,)
    r = poly_mod(F, f, P.poly)
    return tuple(r) + (0,) * (P.degree - len(r))


def ev_Q_map(Q: Place) -> tuple[list[list[int]], list[list[int]]]:
    """Matrix of L((n-1)P_inf) -> F_q[x]/(Q) and its inverse: both the identity."""
    n = Q.degree
    return linalg.identity(n), linalg.identity(n)


def place_block(F: GF, P: Place, m: int) -> list[list[int]]:
    """deg(P) x (m+1) matrix of f -> f(P) on L(m*P_inf)."""
    if P.is_infinite:
        return [[int(j == m) for j in range(m + 1)]]
    cols = [evaluate(F, (0,) * j + (1,), P) for j in range(m + 1)]
    return [[col[i] for col in cols] for i in range(P.degree)]


def _check_distinct(places) -> None:
    if len(set(places)) != len(places):
        raise SetupError("evaluation places must be pairwise distinct")


def ev_P_map(F: GF, places, m: int) -> list[list[int]]:
    """Block-stacked evaluation matrix, one block of deg(P) rows per place."""
    places = list(places)
    _check_distinct(places)
    M = []
    for P in places:
        M.extend(place_block(F, P, m))
    return M


def hadamard(F: GF, places, *vectors):
    """Componentwise product of per-place residue tuples.

    Each vector is a sequence with one residue-field element per place.
    """
    places = list(places)
    if not vectors:
        raise ValueError("hadamard needs at least one vector")
    for v in vectors:
        if len(v) != len(places) or any(len(x) != P.degree for x, P in zip(v, places)):
            raise ValueError("vectors do not match the place structure")
    out = []
    for j, P in enumerate(places):
        K = residue_field(F, P)
        acc = vectors[0][j]
        for v in vectors[1:]:
            acc = K.mul(acc, v[j])
        out.append(tuple(acc))
    return tuple(out)


@dataclass(frozen=True)
class EvaluationSetup:
    """Evaluation data for multiplying k elements of F_q[x]/(Q)."""

    F: GF
    Q: Place
    places: tuple[Place, ...]
    k: int
    ev_p: tuple = dc_field(repr=False)
    ev_p_left: tuple = dc_field(repr=False)
    input_blocks: tuple = dc_field(repr=False)

    @property
    def n(self) -> int:
        return self.Q.degree

    @property
    def divisor(self) -> InfinityDivisor:
        return InfinityDivisor(self.n - 1)

    @property
    def product_multiplicity(self) -> int:
        return self.k * (self.n - 1)

    @property
    def total_degree(self) -> int:
        return sum(P.degree for P in self.places)

    def offsets(self) -> list[int]:
        out, s = [], 0
        for P in self.places:
            out.append(s)
            s += P.degree
        return out

    def residues(self, g) -> list[tuple[int, ...]]:
        """Ev_P of an element of L((n-1)P_inf), one residue tuple per place."""
        return [tuple(linalg.matvec(self.F, B, g)) for B in self.input_blocks]


def make_setup(F: GF, Q: Place, places, k: int) -> EvaluationSetup:
    places = tuple(places)
    if Q.is_infinite:
        raise SetupError("Q must be a finite place")
    _check_distinct(places)
    if Q in places:
        raise SetupError("Q must not be an evaluation place")
    n = Q.degree
    m = k * (n - 1)
    if sum(P.degree for P in places) < m + 1:
        raise SetupError(f"evaluation places carry degree < {m + 1}: Ev_P cannot be injective")
    ev_q, _ = ev_Q_map(Q)
    if linalg.rank(F, ev_q) != n:
        raise SetupError("Ev_Q is not bijective")
    ev_p = ev_P_map(F, places, m)
    if linalg.rank(F, ev_p) != m + 1:
        raise SetupError("Ev_P is not injective")
    left = linalg.left_inverse(F, ev_p)
    blocks = tuple(tuple(map(tuple, place_block(F, P, n - 1))) for P in places)
    return EvaluationSetup(
        F,
        Q,
        places,
        k,
        tuple(map(tuple, ev_p)),
        tuple(map(tuple, left)),
        blocks,
    )


def flatten_values(values) -> list[int]:
    return [c for v in values for c in v]


def interpolate(setup: EvaluationSetup, values, m: int | None = None) -> tuple[int, ...]:
    """The unique f of degree <= m with f(P_j) = values[j]; m defaults to k(n-1)."""
    F = setup.F
    if m is None or m == setup.product_multiplicity:
        A, L = setup.ev_p, setup.ev_p_left
    else:
        A = ev_P_map(F, setup.places, m)
        if linalg.rank(F, A) != m + 1:
            raise SetupError("Ev_P is not injective for this multiplicity")
        L = linalg.left_inverse(F, A)
    v = flatten_values(values)
    if len(v) != len(A):
        raise ValueError("value vector does not match the place structure")
    f = linalg.matvec(F, L, v)
    if linalg.matvec(F, A, f) != v:
        raise InterpolationError("values are not in the image of the evaluation map")
    return trim(f)


@functools.lru_cache(maxsize=None)
def reduction_matrix(F: GF, modulus: tuple[int, ...], m: int) -> tuple[tuple[int, ...], ...]:
    """n x (m+1) matrix sending coefficient vectors of degree <= m to f mod modulus."""
    return tuple(map(tuple, place_block(F, Place(modulus), m)))
