"""Exact arithmetic in Z[zeta_p] for prime p.

An element is stored as an integer coefficient vector of length p against
the spanning set 1, zeta, ..., zeta^(p-1). That set is linearly dependent
(the full sum of the powers vanishes), so every element has a one-parameter
family of representatives; the canonical one has coefficient 0 at exponent
0, reached by subtracting coeffs[0] from every entry. Multiplication is a
cyclic convolution modulo X**p - 1 followed by canonicalization.

Keeping all p coordinates (instead of a power basis of rank p-1) makes the
product a plain convolution and the canonical form a one-line rule, at the
cost of one redundant word per element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from . import convolve
from .errors import ModulusMismatch, NotRational
from .ffprime import Prime

# Minimum prime length for which cyc_mul switches to the NTT kernel; None
# keeps schoolbook convolution everywhere. Both kernels are exact and must
# agree bit-for-bit.
_ntt_min_p: int | None = None


def set_ntt_threshold(min_p: int | None) -> None:
    """Route products with p >= min_p through the NTT kernel (None = never)."""
    global _ntt_min_p
    _ntt_min_p = min_p


def _canonical(coeffs: Sequence[int]) -> tuple[int, ...]:
    c0 = coeffs[0]
    if c0 == 0:
        return tuple(coeffs)
    return tuple(c - c0 for c in coeffs)


@dataclass(frozen=True)
class CycInt:
    """Cyclotomic integer in Z[zeta_p], canonical coefficient vector."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        Prime(self.p)
        if len(self.coeffs) != self.p:
            raise ValueError(f"need {self.p} coefficients, got {len(self.coeffs)}")
        if self.coeffs[0] != 0:
            object.__setattr__(self, "coeffs", _canonical(self.coeffs))

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_coeffs(cls, p: int, coeffs: Iterable[int]) -> "CycInt":
        return cls(p, tuple(int(c) for c in coeffs))

    @classmethod
    def from_integer(cls, p: int, k: int) -> "CycInt":
        return cls(p, (int(k),) + (0,) * (p - 1))

    @classmethod
    def zeta_power(cls, p: int, t: int) -> "CycInt":
        v = [0] * p
        v[t % p] = 1
        return cls(p, tuple(v))

    @classmethod
    def zero(cls, p: int) -> "CycInt":
        return cls(p, (0,) * p)

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "CycInt") -> None:
        if self.p != other.p:
            raise ModulusMismatch(f"p = {self.p} vs p = {other.p}")

    def __add__(self, other: "CycInt") -> "CycInt":
        self._check(other)
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CycInt") -> "CycInt":
        self._check(other)
        return CycInt(self.p, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CycInt":
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def scale(self, k: int) -> "CycInt":
        return CycInt(self.p, tuple(k * a for a in self.coeffs))

    def __mul__(self, other: "CycInt") -> "CycInt":
        self._check(other)
        if _ntt_min_p is not None and self.p >= _ntt_min_p:
            prod = convolve.cyclic_convolve_ntt(self.coeffs, other.coeffs)
        else:
            prod = convolve.cyclic_convolve(self.coeffs, other.coeffs)
        return CycInt(self.p, tuple(prod))

    def __pow__(self, n: int) -> "CycInt":
        if n < 0:
            raise ValueError("negative powers are not defined in Z[zeta_p]")
        out = CycInt.from_integer(self.p, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def galois(self, k: int) -> "CycInt":
        """Ring automorphism zeta -> zeta**k for k coprime to p."""
        if k % self.p == 0:
            raise ValueError("k must be a unit mod p")
        v = [0] * self.p
        for t, c in enumerate(self.coeffs):
            v[(k * t) % self.p] += c
        return CycInt(self.p, tuple(v))

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        tail = self.coeffs[1:]
        return all(c == tail[0] for c in tail)

    def __repr__(self) -> str:
        return f"CycInt(p={self.p}, coeffs={self.coeffs})"


def cyc_add(x: CycInt, y: CycInt) -> CycInt:
    """Canonical sum of two cyclotomic integers with the same conductor."""
    return x + y


def cyc_mul(x: CycInt, y: CycInt) -> CycInt:
    """Canonical product, via cyclic convolution modulo X**p - 1."""
    return x * y


def as_integer(x: CycInt) -> int:
    """Rational value of x, when it has one.

    In canonical form a rational element reads c*(zeta + ... + zeta^(p-1))
    = -c; anything else raises NotRational.
    """
    if not x.is_rational():
        raise NotRational(f"element is irrational: {x!r}")
    return -x.coeffs[1]


# ---------------------------------------------------------------------------
# Rigorous complex enclosure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComplexEnclosure:
    """Axis-aligned enclosure: |Re(z) - re_mid| and |Im(z) - im_mid| <= radius."""

    re_mid: Fraction
    im_mid: Fraction
    radius: Fraction

    def contains_real(self, value: Fraction | int) -> bool:
        value = Fraction(value)
        return (
            abs(self.re_mid - value) <= self.radius
            and abs(self.im_mid) <= self.radius
        )

    @property
    def re_lo(self) -> Fraction:
        return self.re_mid - self.radius

    @property
    def re_hi(self) -> Fraction:
        return self.re_mid + self.radius


def _raw_mpf_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise OverflowError("non-finite interval endpoint")
    val = Fraction(int(man)) * (Fraction(2) ** exp)
    return -val if sign else val


def _iv_to_bounds(x) -> tuple[Fraction, Fraction]:
    lo_raw, hi_raw = x._mpi_
    return _raw_mpf_to_fraction(lo_raw), _raw_mpf_to_fraction(hi_raw)


def unit_root_intervals(p: int, precision: int):
    """Interval enclosures of cos and sin of 2*pi*t/p for t = 0..p-1.

    Endpoints are exact binary rationals from mpmath's outward-rounded
    interval context, so downstream bounds are fully rigorous.
    """
    iv = mpmath.iv
    old = iv.prec
    try:
        iv.prec = precision
        two_pi = 2 * iv.pi
        cos_iv, sin_iv = [], []
        for t in range(p):
            arg = two_pi * t / p
            cos_iv.append(_iv_to_bounds(iv.cos(arg)))
            sin_iv.append(_iv_to_bounds(iv.sin(arg)))
        return cos_iv, sin_iv
    finally:
        iv.prec = old


_ROOT_CACHE: dict[tuple[int, int], tuple[list, list]] = {}


def _cached_roots(p: int, precision: int):
    key = (p, precision)
    if key not in _ROOT_CACHE:
        if len(_ROOT_CACHE) > 64:
            _ROOT_CACHE.clear()
        _ROOT_CACHE[key] = unit_root_intervals(p, precision)
    return _ROOT_CACHE[key]


def approx_complex(x: CycInt, precision: int = 53) -> ComplexEnclosure:
    """Rigorous enclosure of sum_t coeffs[t] * exp(2*pi*i*t/p).

    precision is the working precision in bits (>= 53); the returned radius
    bounds the total rounding error of the evaluation.
    """
    if precision < 53:
        raise ValueError("precision must be at least 53 bits")
    cos_iv, sin_iv = _cached_roots(x.p, precision)
    re_lo = re_hi = im_lo = im_hi = Fraction(0)
    for t, c in enumerate(x.coeffs):
        if c == 0:
            continue
        clo, chi = cos_iv[t]
        slo, shi = sin_iv[t]
        if c > 0:
            re_lo += c * clo
            re_hi += c * chi
            im_lo += c * slo
            im_hi += c * shi
        else:
            re_lo += c * chi
            re_hi += c * clo
            im_lo += c * shi
            im_hi += c * slo
    re_mid = (re_lo + re_hi) / 2
    im_mid = (im_lo + im_hi) / 2
    radius = max(re_hi - re_mid, im_hi - im_mid)
    return ComplexEnclosure(re_mid, im_mid, radius)
