"""Prime-field arithmetic and small number-theoretic helpers.

Everything here is deterministic: primality uses a fixed Miller-Rabin
witness set proven complete for 64-bit inputs, and the Jacobi symbol uses
binary quadratic reciprocity (no factoring, so composite moduli like
double factorials are fine).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

from .errors import EvenInput, EvenModulus, ZeroInverse

# Jaeschke/Sorenson-Webster witness set: deterministic for n < 3.3e24,
# which covers every 64-bit integer.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@lru_cache(maxsize=8192)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact for n < 2**64)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes p with lo <= p <= hi, by sieve."""
    if hi < 2 or hi < lo:
        return []
    sieve = bytearray([1]) * (hi + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(hi) + 1):
        if sieve[i]:
            sieve[i * i :: i] = b"\x00" * len(range(i * i, hi + 1, i))
    return [i for i in range(max(lo, 2), hi + 1) if sieve[i]]


class Prime(int):
    """An int validated to be prime at construction."""

    def __new__(cls, value: int) -> "Prime":
        value = int(value)
        if not is_prime(value):
            raise ValueError(f"{value} is not prime")
        return super().__new__(cls, value)


@dataclass(frozen=True)
class FieldElem:
    """Element of F_p, stored as the canonical representative in [0, p)."""

    modulus: Prime
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"{self.value} out of range for F_{self.modulus}")


def inv_mod(a: int, p: int) -> int:
    """Inverse of a modulo the prime p."""
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def inverse_table(p: int) -> list[int]:
    """inv[x] for all x in F_p (inv[0] = 0), built in O(p)."""
    inv = [0] * p
    if p > 1:
        inv[1] = 1
    for x in range(2, p):
        inv[x] = (p - p // x) * inv[p % x] % p
    return inv


def mod_inverse(x: FieldElem) -> FieldElem:
    """Multiplicative inverse in F_p; raises ZeroInverse at 0."""
    return FieldElem(x.modulus, inv_mod(x.value, x.modulus))


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1, by binary reciprocity.

    Fully multiplicative in both arguments; returns 0 when gcd(a, n) > 1.
    n is never factored, so large composite moduli are cheap.
    """
    if n < 1 or n % 2 == 0:
        raise EvenModulus(f"Jacobi symbol needs odd n >= 1, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def double_factorial(d: int) -> int:
    """d!! = d(d-2)(d-4)...1 for odd d >= 1."""
    if d < 1 or d % 2 == 0:
        raise EvenInput(f"double factorial defined here for odd d >= 1, got {d}")
    out = 1
    for k in range(d, 0, -2):
        out *= k
    return out
