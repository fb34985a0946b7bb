"""Exact arithmetic in F_q = F_p[t]/(m(t)), polynomials over F_q, and F_{q^d}.

Elements of F_q are integer labels: the coefficient sequence over F_p read as
a base-p integer, little-endian by degree (label = sum c_i p^i).  Polynomials
over F_q are tuples of labels in ascending degree with no trailing zeros; the
zero polynomial is ``()`` and has degree -1.  Elements of an extension
F_q[x]/(f) are tuples of exactly ``deg f`` labels.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import mobius


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q = p**m, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    f = factorint(q)
    if len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    ((p, m),) = f.items()
    return p, m


class GF:
    """The finite field F_q, q = p^m, with table-driven arithmetic on labels."""

    def __init__(self, p: int, m: int = 1, modulus: tuple[int, ...] | None = None):
        if not isprime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if m < 1:
            raise ValueError("base degree must be >= 1")
        if modulus is None:
            modulus = (0, 1) if m == 1 else _default_prime_modulus(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError(f"base modulus {modulus} is not monic of degree {m}")
        if m > 1 and not is_irreducible(GF(p), modulus):
            raise ValueError(f"base modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self._build_tables()

    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        if m == 1:
            self.add_table = [[(a + b) % p for b in range(q)] for a in range(q)]
            self.mul_table = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            digits = [self._digits(a) for a in range(q)]
            red = self.modulus
            self.add_table = [
                [self._label([(x + y) % p for x, y in zip(digits[a], digits[b])]) for b in range(q)]
                for a in range(q)
            ]
            self.mul_table = [[0] * q for _ in range(q)]
            for a in range(q):
                for b in range(a, q):
                    prod = [0] * (2 * m - 1)
                    for i, x in enumerate(digits[a]):
                        if x:
                            for j, y in enumerate(digits[b]):
                                prod[i + j] += x * y
                    for s in range(2 * m - 2, m - 1, -1):
                        c = prod[s] % p
                        if c:
                            for t in range(m):
                                prod[s - m + t] -= c * red[t]
                        prod[s] = 0
                    v = self._label([c % p for c in prod[:m]])
                    self.mul_table[a][b] = self.mul_table[b][a] = v
        self.neg_table = [self.add_table[a].index(0) for a in range(q)]
        self.inv_table = [0] + [self.mul_table[a].index(1) for a in range(1, q)]

    def _digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.m)]

    def _label(self, digits) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(digits))

    def digits(self, a: int) -> tuple[int, ...]:
        """Coordinates of ``a`` over F_p (ascending degree)."""
        return tuple(self._digits(a))

    def from_digits(self, digits) -> int:
        return self._label(digits)

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.q)
        return self.inv_table[a]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul_table[r][a]
            a = self.mul_table[a][a]
            e >>= 1
        return r

    def elements(self):
        return range(self.q)

    def random(self, rng) -> int:
        return rng.randrange(self.q)

    def _key(self):
        return (self.p, self.m, self.modulus)

    def __eq__(self, other):
        return isinstance(other, GF) and self._key() == other._key()

    def __hash__(self):
        return hash(("GF",) + self._key())

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"


@functools.lru_cache(maxsize=None)
def field(q: int, modulus: tuple[int, ...] | None = None) -> GF:
    """F_q with the default (lexicographically smallest) modulus unless given."""
    p, m = prime_power(q)
    return GF(p, m, modulus)


@functools.lru_cache(maxsize=None)
def _default_prime_modulus(p: int, m: int) -> tuple[int, ...]:
    return enumerate_irreducibles(GF(p), m, 1)[0]


# ---------------------------------------------------------------------------
# Polynomials over F_q
# ---------------------------------------------------------------------------


def trim(f) -> tuple[int, ...]:
    f = tuple(f)
    n = len(f)
    while n and f[n - 1] == 0:
        n -= 1
    return f[:n]


def degree(f) -> int:
    """Degree of a trimmed polynomial; -1 for the zero polynomial."""
    return len(f) - 1


def poly_add(F: GF, f, g) -> tuple[int, ...]:
    if len(f) < len(g):
        f, g = g, f
    add = F.add_table
    out = list(f)
    for i, c in enumerate(g):
        out[i] = add[out[i]][c]
    return trim(out)


def poly_neg(F: GF, f) -> tuple[int, ...]:
    return tuple(F.neg_table[c] for c in f)


def poly_sub(F: GF, f, g) -> tuple[int, ...]:
    return poly_add(F, f, poly_neg(F, g))


def poly_scale(F: GF, f, c: int) -> tuple[int, ...]:
    row = F.mul_table[c]
    return trim(row[a] for a in f)


def poly_mul(F: GF, f, g) -> tuple[int, ...]:
    if not f or not g:
        return ()
    add, mul = F.add_table, F.mul_table
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            row = mul[a]
            for j, b in enumerate(g):
                if b:
                    out[i + j] = add[out[i + j]][row[b]]
    return trim(out)


def poly_divmod(F: GF, f, g) -> tuple[tuple[int, ...], tuple[int, ...]]:
    g = trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(trim(f))
    dg = len(g) - 1
    if len(f) - 1 < dg:
        return (), tuple(f)
    add, mul, neg = F.add_table, F.mul_table, F.neg_table
    lead_inv = F.inv(g[-1])
    quot = [0] * (len(f) - dg)
    for s in range(len(f) - 1, dg - 1, -1):
        c = f[s]
        if c:
            c = mul[c][lead_inv]
            quot[s - dg] = c
            nc = neg[c]
            row = mul[nc]
            for t in range(dg + 1):
                if g[t]:
                    f[s - dg + t] = add[f[s - dg + t]][row[g[t]]]
    return trim(quot), trim(f[:dg])


def poly_mod(F: GF, f, g) -> tuple[int, ...]:
    return poly_divmod(F, f, g)[1]


def poly_monic(F: GF, f) -> tuple[int, ...]:
    f = trim(f)
    if not f:
        return f
    return poly_scale(F, f, F.inv(f[-1]))


def poly_gcd(F: GF, f, g) -> tuple[int, ...]:
    """Monic gcd (the zero polynomial if both inputs are zero)."""
    f, g = trim(f), trim(g)
    while g:
        f, g = g, poly_mod(F, f, g)
    return poly_monic(F, f)


def poly_powmod(F: GF, f, e: int, m) -> tuple[int, ...]:
    result = poly_mod(F, (1,), m)
    base = poly_mod(F, f, m)
    while e:
        if e & 1:
            result = poly_mod(F, poly_mul(F, result, base), m)
        base = poly_mod(F, poly_mul(F, base, base), m)
        e >>= 1
    return result


def _prime_divisors(n: int) -> list[int]:
    return sorted(factorint(n))


def is_irreducible(F: GF, f) -> bool:
    """Rabin's test over F_q for a monic polynomial of degree >= 1."""
    f = trim(f)
    d = len(f) - 1
    if d < 1 or f[-1] != 1:
        raise ValueError("is_irreducible expects a monic polynomial of degree >= 1")
    if d == 1:
        return True
    if f[0] == 0:
        return False
    x = (0, 1)
    # frob[j] = x^(q^j) mod f
    frob = [poly_mod(F, x, f)]
    for _ in range(d):
        frob.append(poly_powmod(F, frob[-1], F.q, f))
    if frob[d] != poly_mod(F, x, f):
        return False
    for e in _prime_divisors(d):
        h = poly_sub(F, frob[d // e], x)
        if len(poly_gcd(F, h, f)) != 1:
            return False
    return True


def monic_polynomials(F: GF, d: int):
    """All monic degree-d polynomials, lexicographic with the constant term first."""
    for coeffs in itertools.product(range(F.q), repeat=d):
        yield coeffs + (1,)


def _monic_from_nonzero_constant(F: GF, d: int):
    for c0 in range(1, F.q):
        for rest in itertools.product(range(F.q), repeat=d - 1):
            yield (c0,) + rest + (1,)


def enumerate_irreducibles(F: GF, d: int, limit: int | None = None) -> list[tuple[int, ...]]:
    if d < 1:
        raise ValueError("degree must be >= 1")
    out = []
    if limit is not None and limit <= 0:
        return out
    # for d > 1 the leading block (constant term 0) is divisible by x
    candidates = monic_polynomials(F, d) if d == 1 else _monic_from_nonzero_constant(F, d)
    for f in candidates:
        if is_irreducible(F, f):
            out.append(f)
            if limit is not None and len(out) >= limit:
                break
    return out


@functools.lru_cache(maxsize=None)
def count_irreducibles(q: int, d: int) -> int:
    """Number of monic irreducible polynomials of degree d over F_q."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    total = sum(int(mobius(e)) * q ** (d // e) for e in range(1, d + 1) if d % e == 0)
    return total // d


@functools.lru_cache(maxsize=4096)
def irreducibles_cached(F: GF, d: int, limit: int) -> tuple[tuple[int, ...], ...]:
    return tuple(enumerate_irreducibles(F, d, limit))


def smallest_irreducible(F: GF, d: int) -> tuple[int, ...]:
    return irreducibles_cached(F, d, 1)[0]


def format_poly(F: GF, f, var: str = "x") -> str:
    f = trim(f)
    if not f:
        return "0"
    parts = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{c}*{mono}")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# Extension fields F_q[x]/(f)
# ---------------------------------------------------------------------------


class ExtensionField:
    """F_{q^d} = F_q[x]/(modulus); elements are coordinate tuples in the power basis."""

    def __init__(self, base: GF, modulus, check: bool = True):
        modulus = trim(modulus)
        if len(modulus) < 2 or modulus[-1] != 1:
            raise ValueError("extension modulus must be monic of degree >= 1")
        if check and not is_irreducible(base, modulus):
            raise ValueError(f"extension modulus {modulus} is reducible over {base}")
        self.base = base
        self.modulus = modulus
        self.d = len(modulus) - 1
        # reductions of x^s for s < 2d - 1
        self._red = []
        for s in range(2 * self.d - 1):
            self._red.append(self.from_poly((0,) * s + (1,)))

    @property
    def order(self) -> int:
        return self.base.q**self.d

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.d

    @property
    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.d - 1)

    def basis(self, i: int) -> tuple[int, ...]:
        v = [0] * self.d
        v[i] = 1
        return tuple(v)

    def from_poly(self, f) -> tuple[int, ...]:
        r = poly_mod(self.base, trim(f), self.modulus)
        return tuple(r) + (0,) * (self.d - len(r))

    def to_poly(self, a) -> tuple[int, ...]:
        return trim(a)

    def embed(self, c: int) -> tuple[int, ...]:
        return (c,) + (0,) * (self.d - 1)

    def add(self, a, b):
        add = self.base.add_table
        return tuple(add[x][y] for x, y in zip(a, b))

    def sub(self, a, b):
        add, neg = self.base.add_table, self.base.neg_table
        return tuple(add[x][neg[y]] for x, y in zip(a, b))

    def neg(self, a):
        neg = self.base.neg_table
        return tuple(neg[x] for x in a)

    def scale(self, c: int, a):
        row = self.base.mul_table[c]
        return tuple(row[x] for x in a)

    def mul(self, a, b):
        d = self.d
        add, mul = self.base.add_table, self.base.mul_table
        conv = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                row = mul[x]
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] = add[conv[i + j]][row[y]]
        out = list(conv[:d])
        for s in range(d, 2 * d - 1):
            c = conv[s]
            if c:
                row = mul[c]
                for t, r in enumerate(self._red[s]):
                    if r:
                        out[t] = add[out[t]][row[r]]
        return tuple(out)

    def inv(self, a):
        a = tuple(a)
        if not any(a):
            raise ZeroDivisionError("inverse of zero in extension field")
        F = self.base
        # extended Euclid: s*a + t*modulus = gcd
        r0, r1 = self.modulus, trim(a)
        s0, s1 = (), (1,)
        while r1:
            qt, rem = poly_divmod(F, r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, poly_sub(F, s0, poly_mul(F, qt, s1))
        # r0 is a nonzero constant
        return self.from_poly(poly_scale(F, s0, F.inv(r0[0])))

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        r = self.one
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def elements(self):
        for coords in itertools.product(range(self.base.q), repeat=self.d):
            yield tuple(coords)

    def random(self, rng):
        return tuple(rng.randrange(self.base.q) for _ in range(self.d))

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and self.base == other.base
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash(("Ext", self.base, self.modulus))

    def __repr__(self):
        return f"ExtensionField({self.base!r}, {format_poly(self.base, self.modulus)})"


@functools.lru_cache(maxsize=4096)
def extension(base: GF, modulus: tuple[int, ...]) -> ExtensionField:
    return ExtensionField(base, modulus)


# ---------------------------------------------------------------------------
# Tower description and checked element wrapper
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldTower:
    """F_p in F_q = F_p[t]/(base_modulus) in F_{q^d} = F_q[x]/(ext_modulus)."""

    p: int
    base_modulus: tuple[int, ...] = (0, 1)
    ext_modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        # GF and ExtensionField validate primality and irreducibility
        base = GF(self.p, len(self.base_modulus) - 1, self.base_modulus)
        if self.ext_modulus is not None:
            ExtensionField(base, self.ext_modulus)

    @property
    def m(self) -> int:
        return len(self.base_modulus) - 1

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def d(self) -> int | None:
        return None if self.ext_modulus is None else len(self.ext_modulus) - 1

    @property
    def base(self) -> GF:
        return field(self.q, tuple(self.base_modulus))

    @property
    def ext(self) -> ExtensionField:
        if self.ext_modulus is None:
            raise ValueError("tower has no extension level")
        return extension(self.base, tuple(self.ext_modulus))

    @classmethod
    def default(cls, q: int, d: int | None = None) -> "FieldTower":
        F = field(q)
        ext = smallest_irreducible(F, d) if d else None
        return cls(F.p, F.modulus, ext)


@dataclass(frozen=True)
class FieldElement:
    """A value tagged with its field level; operations refuse mixed levels."""

    field: object
    value: object

    def _check(self, other):
        if not isinstance(other, FieldElement) or other.field != self.field:
            raise TypeError("operands belong to different field levels")

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.mul(self.value, other.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __truediv__(self, other):
        return self * other.inv()

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def is_zero(self) -> bool:
        return self.value == self.field.zero


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def field_inv(a: FieldElement) -> FieldElement:
    return a.inv()
