import pytest
from hypothesis import given, strategies as st

from klmoments.errors import EvenInput, EvenModulus, ZeroInverse
from klmoments.ffprime import (
    FieldElem,
    Prime,
    double_factorial,
    inv_mod,
    is_prime,
    jacobi_symbol,
    mod_inverse,
    primes_in_range,
)


class TestPrimality:
    def test_small_values(self):
        expected = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
        assert {n for n in range(50) if is_prime(n)} == expected

    def test_carmichael_and_strong_pseudoprimes(self):
        # 3215031751 is a strong pseudoprime to bases 2, 3, 5, 7
        for n in (561, 1105, 1729, 3215031751, 2**31 - 2):
            assert not is_prime(n)
        for n in (2**31 - 1, 999999937, 67280421310721):
            assert is_prime(n)

    def test_prime_type_validates(self):
        assert Prime(13) == 13
        with pytest.raises(ValueError):
            Prime(15)

    def test_primes_in_range(self):
        assert primes_in_range(10, 30) == [11, 13, 17, 19, 23, 29]
        assert primes_in_range(25, 28) == []
        assert primes_in_range(2, 2) == [2]


class TestFieldElem:
    def test_range_validation(self):
        FieldElem(Prime(7), 6)
        with pytest.raises(ValueError):
            FieldElem(Prime(7), 7)
        with pytest.raises(ValueError):
            FieldElem(Prime(7), -1)


class TestModInverse:
    def test_identity(self):
        assert mod_inverse(FieldElem(Prime(7), 1)).value == 1

    def test_example(self):
        assert mod_inverse(FieldElem(Prime(7), 3)).value == 5

    def test_zero(self):
        with pytest.raises(ZeroInverse):
            mod_inverse(FieldElem(Prime(5), 0))

    def test_involution(self):
        for p in (3, 5, 7, 11, 101):
            for a in range(1, p):
                x = FieldElem(Prime(p), a)
                assert mod_inverse(mod_inverse(x)) == x
                assert a * inv_mod(a, p) % p == 1


class TestJacobi:
    def test_examples(self):
        assert jacobi_symbol(1, 15) == 1
        assert jacobi_symbol(2, 15) == 1
        assert jacobi_symbol(7, 15) == -1

    def test_even_modulus_rejected(self):
        with pytest.raises(EvenModulus):
            jacobi_symbol(3, 10)
        with pytest.raises(EvenModulus):
            jacobi_symbol(3, 0)

    def test_shared_factor_gives_zero(self):
        assert jacobi_symbol(6, 9) == 0
        assert jacobi_symbol(35, 105) == 0

    @given(
        st.integers(min_value=-(10**4), max_value=10**4),
        st.integers(min_value=-(10**4), max_value=10**4),
        st.integers(min_value=0, max_value=4999),
    )
    def test_multiplicative(self, a, b, k):
        n = 2 * k + 1
        assert jacobi_symbol(a, n) * jacobi_symbol(b, n) == jacobi_symbol(a * b, n)

    def test_prime_modulus_matches_square_oracle(self):
        for p in primes_in_range(3, 500):
            squares = {x * x % p for x in range(1, p)}
            for a in range(p):
                expected = 0 if a == 0 else (1 if a in squares else -1)
                assert jacobi_symbol(a, p) == expected, (a, p)


class TestDoubleFactorial:
    @pytest.mark.parametrize("d,value", [(1, 1), (3, 3), (5, 15), (7, 105), (13, 135135)])
    def test_values(self, d, value):
        assert double_factorial(d) == value

    def test_even_rejected(self):
        with pytest.raises(EvenInput):
            double_factorial(6)
        with pytest.raises(EvenInput):
            double_factorial(0)
