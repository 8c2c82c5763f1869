"""Power sums S_n(p) and symmetric-power moments m^d_2(p).

Conventions
-----------
restricted   S_n(p)  = sum over a in F_p^*  of Kl_2(p; a)**n
completed    S'_n(p) = S_n(p) + (-1)**n,  i.e. the a = 0 term is included
             with its value Kl_2(p; 0) = sum_{x != 0} psi(x) = -1.

The congruence S'_n(p) == (-1)**(n-1) * (n-1) * p  (mod p**2) holds for the
completed convention only; the restricted S_2 = p**2 - p - 1 already breaks
it. The float path therefore always recovers completed values.

Three independent routes to m^d_2(p) are provided and must agree:

girard       m^d = (-1)**d * sum_k (-1)**k C(d-k, k) p**k S_{d-2k}
             (restricted sums, S_0 := p - 1), the two-variable Newton/
             Girard conversion using alpha + beta = -Kl_2, alpha*beta = p.
direct       per-a recurrence h_j = s*h_{j-1} - p*h_{j-2} in Z[zeta_p]
             with s = -Kl_2(p; a), summed over a.
appendix8    the fixed degree-8 polynomial in completed sums
             S'_8 - 7p S'_6 + 15p^2 S'_4 - 10p^3 S'_2
             + p^5 - p^4 + 10p^3 - 15p^2 + 7p - 1,
             which is the girard formula rewritten in S'_n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .cyclotomic import CycInt, _cached_roots, as_integer
from .errors import (
    AmbiguousRounding,
    BudgetExceeded,
    ExactLimitExceeded,
    MissingPowerSum,
    WrongConvention,
)
from .ffprime import Prime
from .kloosterman import (
    DEFAULT_KLN_BUDGET,
    kl2_counts,
    kln_value,
)

DEFAULT_EXACT_LIMIT = 257
PRECISION_START = 64
PRECISION_CAP = 4096

RESTRICTED = "restricted"
COMPLETED = "completed"

METHOD_EXACT = "exact-cyclotomic"
METHOD_FLOAT = "float-congruence"


@dataclass(frozen=True)
class PowerSumTable:
    """Exact power sums for one prime under one convention."""

    p: int
    convention: str
    values: dict[int, int]
    method: str

    def __getitem__(self, n: int) -> int:
        if n not in self.values:
            raise MissingPowerSum(f"S_{n}({self.p}) not in table (have n <= {max(self.values, default=0)})")
        return self.values[n]

    def to_convention(self, convention: str) -> "PowerSumTable":
        if convention == self.convention:
            return self
        if convention not in (RESTRICTED, COMPLETED):
            raise WrongConvention(f"unknown convention {convention!r}")
        sign = 1 if convention == COMPLETED else -1
        shifted = {n: v + sign * (-1) ** n for n, v in self.values.items()}
        return PowerSumTable(self.p, convention, shifted, self.method)


@dataclass(frozen=True)
class MomentValue:
    p: int
    d: int
    value: int
    method: str


def power_sums_exact(
    p: int,
    nmax: int,
    convention: str = RESTRICTED,
    exact_limit: int = DEFAULT_EXACT_LIMIT,
) -> PowerSumTable:
    """S_n(p) for n = 1..nmax by per-a cumulative products in Z[zeta_p].

    Each partial sum over a is Galois-stable, hence rational; a NotRational
    escape here means the ring arithmetic is broken.
    """
    p = Prime(p)
    if p > exact_limit:
        raise ExactLimitExceeded(f"p = {p} above exact-path limit {exact_limit}")
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    if convention not in (RESTRICTED, COMPLETED):
        raise WrongConvention(f"unknown convention {convention!r}")
    totals = [CycInt.zero(p) for _ in range(nmax + 1)]
    for a in range(1, p):
        base = kl2_counts(p, a).value()
        cum = base
        totals[1] = totals[1] + cum
        for n in range(2, nmax + 1):
            cum = cum * base
            totals[n] = totals[n] + cum
    values = {n: as_integer(totals[n]) for n in range(1, nmax + 1)}
    if convention == COMPLETED:
        values = {n: v + (-1) ** n for n, v in values.items()}
    return PowerSumTable(p, convention, values, METHOD_EXACT)


def completed_congruence_class(n: int, p: int) -> int:
    """The residue (-1)**(n-1) * (n-1) * p of S'_n(p) modulo p**2."""
    return ((-1) ** (n - 1) * (n - 1) * p) % p**2


def _interval_mul(x: tuple[Fraction, Fraction], y: tuple[Fraction, Fraction]):
    products = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
    return min(products), max(products)


def power_sums_float(p: int, nmax: int, precision: int = PRECISION_START) -> PowerSumTable:
    """Completed S'_n(p) from rigorous enclosures plus the mod-p**2 congruence.

    Each Kl_2(p; a) is enclosed by an interval with exact rational endpoints;
    powers and the a-sum stay in interval arithmetic, so the final enclosure
    is certified. The unique admissible integer is the one in the enclosure
    congruent to (-1)**(n-1)(n-1)p mod p**2; zero or several candidates raise
    AmbiguousRounding and the caller must retry at higher precision.
    """
    p = Prime(p)
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    cos_iv, _ = _cached_roots(p, precision)
    zero = (Fraction(0), Fraction(0))
    totals = [zero] * (nmax + 1)
    for a in range(1, p):
        counts = kl2_counts(p, a).counts
        lo = hi = Fraction(0)
        for t, c in enumerate(counts):
            if c:
                lo += c * cos_iv[t][0]
                hi += c * cos_iv[t][1]
        kl = (lo, hi)
        cum = kl
        for n in range(1, nmax + 1):
            if n > 1:
                cum = _interval_mul(cum, kl)
            tl, th = totals[n]
            totals[n] = (tl + cum[0], th + cum[1])
    values = {}
    modulus = p**2
    for n in range(1, nmax + 1):
        lo = totals[n][0] + (-1) ** n
        hi = totals[n][1] + (-1) ** n
        if hi - lo >= modulus:
            raise AmbiguousRounding(
                f"S'_{n}({p}): enclosure width {float(hi - lo):.3g} >= p^2"
            )
        r = completed_congruence_class(n, p)
        # smallest integer >= lo congruent to r mod p^2
        start = lo.__ceil__()
        k = start + (r - start) % modulus
        if k > hi:
            raise AmbiguousRounding(f"S'_{n}({p}): no admissible integer in enclosure")
        if k + modulus <= hi:
            raise AmbiguousRounding(f"S'_{n}({p}): several admissible integers")
        values[n] = int(k)
    return PowerSumTable(p, COMPLETED, values, METHOD_FLOAT)


def power_sums_float_auto(
    p: int,
    nmax: int,
    precision_start: int = PRECISION_START,
    precision_cap: int = PRECISION_CAP,
) -> tuple[PowerSumTable, int]:
    """Run the float path, doubling precision until rounding is unambiguous.

    Returns the table and the precision that succeeded. Raises the last
    AmbiguousRounding if the cap is reached without success.
    """
    precision = precision_start
    while True:
        try:
            return power_sums_float(p, nmax, precision), precision
        except AmbiguousRounding:
            if precision >= precision_cap:
                raise
            precision = min(2 * precision, precision_cap)


# ---------------------------------------------------------------------------
# Symmetric-power moments
# ---------------------------------------------------------------------------


def sym_moment_girard(p: int, d: int, table: PowerSumTable) -> MomentValue:
    """m^d_2(p) from a restricted power-sum table."""
    if table.convention != RESTRICTED:
        raise WrongConvention("girard conversion needs restricted power sums")
    if table.p != p:
        raise ValueError(f"table is for p = {table.p}, not {p}")
    if d < 0:
        raise ValueError("d must be >= 0")
    total = 0
    for k in range(d // 2 + 1):
        n = d - 2 * k
        s = table[n] if n >= 1 else p - 1
        total += (-1) ** k * comb(d - k, k) * p**k * s
    return MomentValue(p, d, (-1) ** d * total, "girard")


def sym_moment_direct(
    p: int, d: int, exact_limit: int = DEFAULT_EXACT_LIMIT
) -> MomentValue:
    """m^d_2(p) by the per-a eigenvalue recurrence, as an independent oracle.

    With s = alpha + beta = -Kl_2(p; a) and alpha*beta = p, the complete
    homogeneous traces satisfy h_j = s*h_{j-1} - p*h_{j-2}, h_0 = 1.
    """
    p = Prime(p)
    if p > exact_limit:
        raise ExactLimitExceeded(f"p = {p} above exact-path limit {exact_limit}")
    if d < 0:
        raise ValueError("d must be >= 0")
    if d == 0:
        return MomentValue(p, 0, p - 1, "direct-recurrence")
    total = CycInt.zero(p)
    for a in range(1, p):
        s = -kl2_counts(p, a).value()
        h_prev = CycInt.from_integer(p, 1)
        h = s
        for _ in range(d - 1):
            h_prev, h = h, s * h - h_prev.scale(p)
        total = total + h
    return MomentValue(p, d, as_integer(total), "direct-recurrence")


def sym_moment_appendix8(p: int, table: PowerSumTable) -> MomentValue:
    """m^8_2(p) from completed power sums by the fixed degree-8 polynomial."""
    if table.convention != COMPLETED:
        raise WrongConvention("the degree-8 polynomial needs completed power sums")
    if table.p != p:
        raise ValueError(f"table is for p = {table.p}, not {p}")
    value = (
        table[8]
        - 7 * p * table[6]
        + 15 * p**2 * table[4]
        - 10 * p**3 * table[2]
        + p**5
        - p**4
        + 10 * p**3
        - 15 * p**2
        + 7 * p
        - 1
    )
    return MomentValue(p, 8, value, "appendix8")


def tensor_moment(
    p: int, n: int, d: int, budget: int = DEFAULT_KLN_BUDGET
) -> int:
    """Tensor-power moment: sum over a of ((-1)**(n-1) Kl_n(p; a))**d."""
    p = Prime(p)
    if d < 0:
        raise ValueError("d must be >= 0")
    if d == 0:
        return p - 1
    if n * p**3 > budget:
        raise BudgetExceeded(f"n*p^3 = {n * p**3} exceeds budget {budget}")
    sign = (-1) ** ((n - 1) * d)
    total = CycInt.zero(p)
    for a in range(1, p):
        total = total + kln_value(p, a, n, budget) ** d
    return sign * as_integer(total)


def sym_moment(
    p: int,
    d: int,
    exact_limit: int = DEFAULT_EXACT_LIMIT,
    precision_start: int = PRECISION_START,
    precision_cap: int = PRECISION_CAP,
    table: PowerSumTable | None = None,
) -> MomentValue:
    """m^d_2(p) via the configured route: exact girard when p is within the
    exact limit, float-congruence girard beyond it."""
    if table is not None and table.p == p:
        restricted = table.to_convention(RESTRICTED)
        if all(n in restricted.values for n in range(d % 2 if d % 2 else 2, d + 1, 2)) or d == 0:
            mv = sym_moment_girard(p, d, restricted)
            suffix = "exact" if restricted.method == METHOD_EXACT else "float"
            return MomentValue(p, d, mv.value, f"girard-{suffix}")
    if p <= exact_limit:
        t = power_sums_exact(p, max(d, 1), RESTRICTED, exact_limit)
        return MomentValue(p, d, sym_moment_girard(p, d, t).value, "girard-exact")
    t, _ = power_sums_float_auto(p, max(d, 1), precision_start, precision_cap)
    value = sym_moment_girard(p, d, t.to_convention(RESTRICTED)).value
    return MomentValue(p, d, value, "girard-float")
