"""Closed-form bounds from Garcia-Stichtenoth towers.

Every verdict is exact.  Quantities such as q^{(n-1)/2} or l^{i/2} are
handled as numbers a + b*sqrt(D) with rational a, b (``Surd``); floats only
appear in the human-readable columns of reports.

Notation: q is the constant field size, k >= 2 the number of factors, r the
smallest even integer with q^{r/2} > k + 1, l = q^{r/2}, and the tower lives
over F_{l^2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import builder
from .errors import ConfigurationError
from .field import GF, field, prime_power


# ---------------------------------------------------------------------------
# Exact arithmetic in Q(sqrt(D))
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Surd:
    """a + b*sqrt(D) with rational a, b and an integer D >= 1."""

    a: Fraction
    b: Fraction
    D: int

    @classmethod
    def const(cls, x, D: int) -> "Surd":
        return cls(Fraction(x), Fraction(0), D)

    @classmethod
    def root(cls, D: int) -> "Surd":
        return cls(Fraction(0), Fraction(1), D)

    def _coerce(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.D != self.D:
                raise ValueError("mixed radicands")
            return other
        return Surd.const(other, self.D)

    def __add__(self, other):
        o = self._coerce(other)
        return Surd(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.D)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return Surd(self.a * o.a + self.b * o.b * self.D, self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 D
        diff = a * a - b * b * self.D
        if diff == 0:
            return 0
        return sa if diff > 0 else sb

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0


def half_power(base: int, e: int) -> Surd:
    """base^(e/2) for an integer e >= 0, as a Surd over sqrt(base)."""
    if e < 0:
        raise ValueError("negative exponent")
    whole = Fraction(base ** (e // 2))
    if e % 2:
        return Surd(Fraction(0), whole, base)
    return Surd(whole, Fraction(0), base)


# ---------------------------------------------------------------------------
# Tower parameters and closed forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TowerParams:
    q: int
    k: int
    r: int
    l: int


def smallest_even_r(q: int, k: int) -> TowerParams:
    """Smallest even r with r > 2 log_q(k+1), i.e. q^r > (k+1)^2 (strict)."""
    prime_power(q)
    if k < 2:
        raise ValueError("k must be >= 2")
    r = 2
    while not (k + 1) ** 2 < q**r:
        r += 2
    return TowerParams(q, k, r, q ** (r // 2))


def gs_genus(l: int, i: int) -> int:
    if i < 0:
        raise ValueError("step index must be >= 0")
    if i % 2:
        return (l ** ((i + 1) // 2) - 1) ** 2
    return (l ** (i // 2) - 1) * (l ** ((i + 2) // 2) - 1)


def _genus_bound_surds(l: int, i: int) -> tuple[Surd, Surd, Surd]:
    lower = (half_power(l, i) - 1) * (half_power(l, i + 1) - 1)
    upper = (half_power(l, i + 2) - 1) * (half_power(l, i + 1) - 1)
    tight = Surd.const(l ** (i + 1), l) - 2 * half_power(l, i + 1) + 1
    return lower, upper, tight


def gs_genus_bounds(l: int, i: int) -> tuple[float, float, float]:
    """(lower, upper, tight_upper) genus bounds as floats, for display."""
    if i < 1:
        raise ValueError("step index must be >= 1")
    return tuple(float(s) for s in _genus_bound_surds(l, i))


@dataclass(frozen=True)
class GenusCheck:
    genus: int
    strict_lower: bool
    strict_upper: bool
    tight_upper: bool

    @property
    def ok(self) -> bool:
        return self.strict_lower and self.strict_upper and self.tight_upper


def genus_sandwich(l: int, i: int) -> GenusCheck:
    """Exact check of lower < g_i < upper and g_i <= tight_upper."""
    g = gs_genus(l, i)
    lower, upper, tight = _genus_bound_surds(l, i)
    return GenusCheck(g, lower < g, upper > g, tight >= g)


def gs_N1(l: int, i: int, even_characteristic: bool) -> int:
    """Number of degree-one places of the i-th tower step over F_{l^2}."""
    return l**i * (l * l - l) + (2 * l * l if even_characteristic else 2 * l)


def existence_condition(q: int, n: int, g: int) -> bool:
    """2g + 1 <= q^{(n-1)/2} (q^{1/2} - 1), exactly.

    Sufficient for a degree-n place to exist on a genus-g curve over F_q.
    """
    rhs = half_power(q, n - 1) * (Surd.root(q) - 1)
    return rhs >= 2 * g + 1


def gamma_exact(q: int, g: int) -> int:
    """Smallest n >= 1 satisfying the existence condition for genus g.

    With l = q^{r/2}, l^{(n-1)/r} (l^{1/r} - 1) equals q^{(n-1)/2} (q^{1/2} - 1),
    so this is the infimum of the place-existence set of a tower step.
    """
    n = 1
    while not existence_condition(q, n, g):
        n += 1
    return n


def tower_M(l: int, i: int) -> int:
    return l**i * (l * l - l)


def tower_delta(q: int, k: int, i: int) -> int:
    tp = smallest_even_r(q, k)
    return tower_M(tp.l, i) - k * gs_genus(tp.l, i) + k


@dataclass(frozen=True)
class StepStats:
    q: int
    k: int
    i: int
    r: int
    l: int
    genus: int
    genus_bounds: tuple[float, float, float]
    M: int
    delta: int
    gamma: int  # exact, by search
    gamma_claimed: int  # r(i+1)+3
    R: int  # largest n with delta > k n
    R_claimed: int  # (k+1)^i
    guaranteed: tuple[int, int]  # [r(i+1)+3, (k+1)^i]

    @property
    def action_domain(self) -> tuple[int, int]:
        return (self.gamma, self.R)

    @property
    def gamma_claim_holds(self) -> bool:
        return self.gamma <= self.gamma_claimed


def step_stats(q: int, k: int, i: int) -> StepStats:
    if i < 1:
        raise ValueError("step index must be >= 1")
    tp = smallest_even_r(q, k)
    r, l = tp.r, tp.l
    g = gs_genus(l, i)
    M = tower_M(l, i)
    delta = M - k * g + k
    R = -(-delta // k) - 1
    return StepStats(
        q,
        k,
        i,
        r,
        l,
        g,
        gs_genus_bounds(l, i),
        M,
        delta,
        gamma_exact(q, g),
        r * (i + 1) + 3,
        R,
        (k + 1) ** i,
        (r * (i + 1) + 3, (k + 1) ** i),
    )


class CoverageError(ValueError):
    """n lies below 2r+3, where no tower step is guaranteed."""


@dataclass(frozen=True)
class StepSearch:
    n: int
    r: int
    guaranteed_step: int | None  # smallest i with n in [r(i+1)+3, (k+1)^i]
    exact_step: int | None  # smallest i >= 1 with n in [Gamma_i, R_i]
    estimate: float  # (2/r) log_q(kn)


def find_step(q: int, k: int, n: int, max_step: int = 64) -> StepSearch:
    tp = smallest_even_r(q, k)
    r = tp.r
    if n < 2 * r + 3:
        raise CoverageError(f"n={n} < 2r+3={2 * r + 3}")
    guaranteed = None
    i = 1
    while r * (i + 1) + 3 <= n:
        if n <= (k + 1) ** i:
            guaranteed = i
            break
        i += 1
    exact = None
    for i in range(1, max_step + 1):
        s = step_stats(q, k, i)
        if s.gamma > n:
            break
        if n <= s.R:
            exact = i
            break
    return StepSearch(n, r, guaranteed, exact, 2 / r * math.log(k * n, q))


def tower_step(q: int, k: int, n: int) -> int:
    """Smallest i >= 0 with M_i > kn + k g_i - k (i.e. Delta_i > kn)."""
    i = 0
    while tower_delta(q, k, i) <= k * n:
        i += 1
    return i


# ---------------------------------------------------------------------------
# Rank tables and the bounds themselves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MuTable:
    """Upper-bound witnesses per degree i = 1..len: s(i) for the k-fold
    product, b(i) for the bilinear one."""

    s: tuple[int, ...]
    b: tuple[int, ...]
    provenance: tuple[str, ...] = ()

    def covers(self, r: int) -> bool:
        return len(self.s) >= r and len(self.b) >= r

    @property
    def verified(self) -> bool:
        return all(p != "user-supplied" for p in self.provenance)


def _argmax_ratio(values, r: int) -> int:
    best = 1
    for i in range(2, r + 1):
        if Fraction(values[i - 1], i) > Fraction(values[best - 1], best):
            best = i
    return best


def r0(table: MuTable, r: int) -> int:
    return _argmax_ratio(table.s, r)


def r0_prime(table: MuTable, r: int) -> int:
    return _argmax_ratio(table.b, r)


@dataclass(frozen=True)
class BoundPair:
    mu: Fraction
    nu: Fraction
    r0: int
    r0_prime: int


def _require(table: MuTable, r: int) -> None:
    if not table.covers(r):
        raise ConfigurationError(f"rank table must cover degrees 1..{r}")


def thm3_bounds(n: int, g: int, r: int, k: int, table: MuTable) -> BoundPair:
    """(kn+kg-k+r) s(r0)/r0 and (k-1)(kn+kg-k+r) b(r0')/r0'."""
    _require(table, r)
    a, ap = r0(table, r), r0_prime(table, r)
    base = k * n + k * g - k + r
    mu = Fraction(base * table.s[a - 1], a)
    nu = Fraction((k - 1) * base * table.b[ap - 1], ap)
    return BoundPair(mu, nu, a, ap)


def thm4_bounds(q: int, k: int, n: int, table: MuTable) -> BoundPair:
    tp = smallest_even_r(q, k)
    _require(table, tp.r)
    a, ap = r0(table, tp.r), r0_prime(table, tp.r)
    c = k * tp.l + 1
    mu = Fraction((k * c * n - k + 1) * table.s[a - 1], a)
    nu = Fraction((k * (k - 1) * c * n - (k - 1) ** 2) * table.b[ap - 1], ap)
    return BoundPair(mu, nu, a, ap)


@dataclass(frozen=True)
class CorollaryBounds:
    mu: Fraction  # k(k q^{r/2} + 1) s(r0)/r0 n
    mu_simplified: Fraction  # k(k(k+1)q + 1) s(r0)/r0 n
    nu: Fraction
    nu_simplified: Fraction


def corollary_bounds(q: int, k: int, n: int, table: MuTable) -> CorollaryBounds:
    tp = smallest_even_r(q, k)
    _require(table, tp.r)
    a, ap = r0(table, tp.r), r0_prime(table, tp.r)
    rs, rb = Fraction(table.s[a - 1], a), Fraction(table.b[ap - 1], ap)
    c, cs = k * tp.l + 1, k * (k + 1) * q + 1
    return CorollaryBounds(
        k * c * rs * n, k * cs * rs * n, k * (k - 1) * c * rb * n, k * (k - 1) * cs * rb * n
    )


def linear_coefficient(q: int, k: int) -> int:
    """k(k q^{r/2} + 1): the coefficient of n before the table factor."""
    tp = smallest_even_r(q, k)
    return k * (k * tp.l + 1)


def builder_mu_table(
    F: GF, k: int, r: int, mode: str = "recursive", use_infinity: bool = True
) -> MuTable:
    """Witness table from verified decompositions built by this package."""
    s = tuple(best_witness(F, i, k, mode, use_infinity) for i in range(1, r + 1))
    b = tuple(best_witness(F, i, 2, mode, use_infinity) for i in range(1, r + 1))
    return MuTable(s, b, ("builder-generated",) * r)


# ---------------------------------------------------------------------------
# Elementary relations between witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Relation:
    name: str
    lhs: int | None
    rhs: int | None
    holds: bool | None  # None: not checkable with available witnesses
    note: str = ""


def nu_witness(F: GF, n: int, k: int, mode="recursive", use_infinity=True) -> int:
    chained = builder.build(F, n, k, mode, use_infinity).cost_report().nu_count
    return min(chained, (k - 1) * builder.mu_witness(F, n, 2, mode, use_infinity))


def best_witness(F: GF, d: int, k: int, mode="recursive", use_infinity=True) -> int:
    """Smallest verified rank for degree d: direct builds and every tower split."""
    best = builder.mu_witness(F, d, k, mode, use_infinity)
    if F.m != 1:
        return best
    for n in range(2, d):
        if d % n == 0:
            try:
                comp = builder.compose_tower(F, n, d // n, k, mode, use_infinity)
            except ConfigurationError:
                continue
            best = min(best, comp.rank)
    return best


def composed_mu_witness(F: GF, n: int, m: int, k: int, mode="recursive", use_infinity=True):
    """Best rank for F_{q^{nm}} including the tower composition (prime q only)."""
    direct = builder.mu_witness(F, n * m, k, mode, use_infinity)
    if F.m != 1:
        return direct
    try:
        comp = builder.compose_tower(F, n, m, k, mode, use_infinity).rank
    except ConfigurationError:
        return direct
    return min(direct, comp)


def lemma1_report(q: int, k: int, n: int, m: int, mode="recursive", use_infinity=True):
    """Witness-level checks of the elementary complexity inequalities.

    The subfield for the splitting is F_{q^n}; the outer degree is m.
    """
    F = field(q)
    Fn = field(q**n)
    out = []
    one = builder.build(F, 1, k, mode, use_infinity).cost_report().nu_count
    out.append(Relation("nu(1) <= k-1", one, k - 1, one <= k - 1))

    nu_chain = builder.build(F, n, k, mode, use_infinity).cost_report().nu_count
    mu2 = builder.mu_witness(F, n, 2, mode, use_infinity)
    nu_n = min(nu_chain, (k - 1) * mu2)
    out.append(
        Relation(
            "nu(n) <= (k-1) mu_2(n)",
            nu_n,
            (k - 1) * mu2,
            nu_n <= (k - 1) * mu2,
            f"chained count of the build is {nu_chain}",
        )
    )

    mu_n = builder.mu_witness(F, n, k, mode, use_infinity)
    mu_nm = composed_mu_witness(F, n, m, k, mode, use_infinity)
    out.append(
        Relation(
            "mu(n) <= mu(nm)",
            mu_n,
            mu_nm,
            None,
            f"relation between minima; witnesses {mu_n} and {mu_nm}",
        )
    )
    mu_outer = builder.mu_witness(Fn, m, k, mode, use_infinity)
    out.append(
        Relation(
            "mu(nm) <= mu(n) * mu_{q^n}(m)",
            mu_nm,
            mu_n * mu_outer,
            mu_nm <= mu_n * mu_outer,
        )
    )

    nu_n_full = nu_witness(F, n, k, mode, use_infinity)
    nu_outer = nu_witness(Fn, m, k, mode, use_infinity)
    nu_nm = nu_witness(F, n * m, k, mode, use_infinity)
    if F.m == 1:
        # each bilinear F_{q^n}-product of the outer chain costs mu_2(n)
        nu_nm = min(nu_nm, nu_outer * mu2)
    out.append(
        Relation(
            "nu(nm) <= nu(n) * nu_{q^n}(m)",
            nu_nm,
            nu_n_full * nu_outer,
            nu_nm <= nu_n_full * nu_outer,
        )
    )
    return out


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    q: int
    k: int
    n: int
    params: TowerParams
    table: MuTable
    step: int
    step_estimate: float
    genus: int
    existence: bool
    genus_bound: BoundPair
    tower: BoundPair
    linear: CorollaryBounds
    coefficient: int
    search: StepSearch | None
    step_rows: list[StepStats] = dc_field(default_factory=list)
    relations: list[Relation] = dc_field(default_factory=list)
    split: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        def fr(x: Fraction):
            return str(x)

        def pair(b: BoundPair):
            return {"mu": fr(b.mu), "nu": fr(b.nu), "r0": b.r0, "r0_prime": b.r0_prime}

        return {
            "q": self.q,
            "k": self.k,
            "n": self.n,
            "r": self.params.r,
            "l": self.params.l,
            "table": {
                "s": list(self.table.s),
                "b": list(self.table.b),
                "provenance": list(self.table.provenance),
            },
            "tower_step": self.step,
            "step_estimate": round(self.step_estimate, 6),
            "genus": self.genus,
            "place_of_degree_n_guaranteed": self.existence,
            "genus_bound": pair(self.genus_bound),
            "tower_bound": pair(self.tower),
            "linear_coefficient": self.coefficient,
            "linear_bound": {
                "mu": fr(self.linear.mu),
                "mu_simplified": fr(self.linear.mu_simplified),
                "nu": fr(self.linear.nu),
                "nu_simplified": fr(self.linear.nu_simplified),
            },
            "coverage": None
            if self.search is None
            else {
                "guaranteed_step": self.search.guaranteed_step,
                "exact_step": self.search.exact_step,
            },
            "steps": [
                {
                    "i": s.i,
                    "genus": s.genus,
                    "M": s.M,
                    "delta": s.delta,
                    "gamma_exact": s.gamma,
                    "gamma_claimed": s.gamma_claimed,
                    "R": s.R,
                    "R_claimed": s.R_claimed,
                }
                for s in self.step_rows
            ],
            "relations_split": None if self.split is None else list(self.split),
            "relations": [
                {"relation": x.name, "lhs": x.lhs, "rhs": x.rhs, "holds": x.holds, "note": x.note}
                for x in self.relations
            ],
        }


def bound_report(
    q: int,
    k: int,
    n: int,
    table: MuTable | None = None,
    steps: int = 4,
    split: tuple[int, int] | None = None,
    mode: str = "recursive",
    use_infinity: bool = True,
) -> BoundReport:
    tp = smallest_even_r(q, k)
    if table is None:
        table = builder_mu_table(field(q), k, tp.r, mode, use_infinity)
    i = tower_step(q, k, n)
    g = gs_genus(tp.l, i)
    try:
        search = find_step(q, k, n)
    except CoverageError:
        search = None
    rows = [step_stats(q, k, j) for j in range(1, steps + 1)]
    lem = lemma1_report(q, k, split[0], split[1], mode, use_infinity) if split else []
    return BoundReport(
        q,
        k,
        n,
        tp,
        table,
        i,
        2 / tp.r * math.log(k * n, q),
        g,
        existence_condition(q, n, g),
        thm3_bounds(n, g, tp.r, k, table),
        thm4_bounds(q, k, n, table),
        corollary_bounds(q, k, n, table),
        linear_coefficient(q, k),
        search,
        rows,
        lem,
        split,
    )


def genus0_bound(alg) -> Fraction:
    """Genus-0 rank bound (kn - k + r') max_{i<=r'} s(i)/i, r' the largest place degree."""
    if alg.setup is None:
        return Fraction(1)
    rp = alg.plan.largest_degree
    ratios = [
        Fraction(builder.estimated_rank(alg.F, i, alg.k, alg.plan.mode, alg.plan.use_infinity), i)
        for i in range(1, rp + 1)
    ]
    return (alg.k * (alg.n - 1) + rp) * max(ratios)
