import pytest

from klmoments.cyclotomic import CycInt, as_integer
from klmoments.errors import (
    AmbiguousRounding,
    BudgetExceeded,
    ExactLimitExceeded,
    MissingPowerSum,
    WrongConvention,
)
from klmoments.ffprime import primes_in_range
from klmoments.kloosterman import kl2_counts
from klmoments.moments import (
    COMPLETED,
    RESTRICTED,
    completed_congruence_class,
    power_sums_exact,
    power_sums_float,
    power_sums_float_auto,
    sym_moment,
    sym_moment_appendix8,
    sym_moment_direct,
    sym_moment_girard,
    tensor_moment,
)


class TestPowerSumsExact:
    def test_p3(self):
        t = power_sums_exact(3, 2)
        assert t.values == {1: 1, 2: 5}

    def test_restricted_s1_is_one(self, sum_tables_200):
        assert all(t.values[1] == 1 for t in sum_tables_200.values())

    def test_restricted_s2_closed_form(self):
        for p in primes_in_range(2, 50):
            t = power_sums_exact(p, 2)
            assert t.values[2] == p * p - p - 1

    def test_completed_shift(self):
        t = power_sums_exact(3, 2, COMPLETED)
        assert t.values == {1: 0, 2: 6}
        assert t.values[2] % 9 == (-3) % 9

    def test_completed_congruence(self, sum_tables_200):
        for p, t in sum_tables_200.items():
            completed = t.to_convention(COMPLETED)
            for n, v in completed.values.items():
                assert v % p**2 == completed_congruence_class(n, p), (p, n)

    def test_exact_limit(self):
        with pytest.raises(ExactLimitExceeded):
            power_sums_exact(263, 2, exact_limit=257)

    def test_character_independence(self):
        # replacing psi by psi(k .) permutes each Kl_2 by a Galois map and
        # leaves every power sum unchanged
        for p in (3, 5, 7, 11, 13):
            base = power_sums_exact(p, 5)
            for k in range(2, p):
                totals = {n: CycInt.zero(p) for n in range(1, 6)}
                for a in range(1, p):
                    kl = kl2_counts(p, a).value().galois(k)
                    cum = kl
                    totals[1] = totals[1] + cum
                    for n in range(2, 6):
                        cum = cum * kl
                        totals[n] = totals[n] + cum
                assert {n: as_integer(v) for n, v in totals.items()} == base.values


class TestTableConventions:
    def test_round_trip(self):
        t = power_sums_exact(5, 4)
        assert t.to_convention(COMPLETED).to_convention(RESTRICTED).values == t.values

    def test_missing_power_sum(self):
        t = power_sums_exact(5, 2)
        with pytest.raises(MissingPowerSum):
            t[3]

    def test_unknown_convention(self):
        with pytest.raises(WrongConvention):
            power_sums_exact(5, 2).to_convention("other")


class TestPowerSumsFloat:
    def test_p3_n2(self):
        t = power_sums_float(3, 2, 64)
        assert t.values[2] == 6

    def test_agrees_with_exact_up_to_61(self):
        for p in primes_in_range(2, 61):
            exact = power_sums_exact(p, 8).to_convention(COMPLETED)
            flt, used = power_sums_float_auto(p, 8)
            assert flt.values == exact.values
            assert used <= 4096

    def test_insufficient_precision_is_ambiguous(self):
        # S'_16(101) needs far more than 53 bits: the enclosure is wider
        # than p^2 and the congruence class cannot be pinned
        with pytest.raises(AmbiguousRounding):
            power_sums_float(101, 16, 53)

    def test_auto_escalation_recovers(self):
        flt, used = power_sums_float_auto(101, 16, precision_start=53)
        exact = power_sums_exact(101, 16).to_convention(COMPLETED)
        assert flt.values == exact.values
        assert used > 53


class TestGirard:
    def test_degree_zero(self, sum_tables_200):
        for p, t in sum_tables_200.items():
            assert sym_moment_girard(p, 0, t).value == p - 1

    def test_degrees_one_and_two(self, sum_tables_200):
        for p, t in sum_tables_200.items():
            assert sym_moment_girard(p, 1, t).value == -1
            assert sym_moment_girard(p, 2, t).value == -1

    def test_degree_four(self, sum_tables_200):
        for p, t in sum_tables_200.items():
            if p > 2:
                assert sym_moment_girard(p, 4, t).value == -1 - p * p

    def test_needs_restricted(self):
        t = power_sums_exact(5, 4, COMPLETED)
        with pytest.raises(WrongConvention):
            sym_moment_girard(5, 4, t)

    def test_missing_sum(self):
        t = power_sums_exact(5, 2)
        with pytest.raises(MissingPowerSum):
            sym_moment_girard(5, 6, t)


class TestDirectRecurrence:
    def test_hand_computed_p3_d2(self):
        # s(a=1) = 1 gives h2 = -2, s(a=2) = -2 gives h2 = 1; total -1
        assert sym_moment_direct(3, 2).value == -1

    def test_degree_zero(self):
        assert sym_moment_direct(7, 0).value == 6

    def test_agrees_with_girard(self):
        for p in primes_in_range(2, 31):
            table = power_sums_exact(p, 8)
            for d in range(9):
                assert (
                    sym_moment_direct(p, d).value
                    == sym_moment_girard(p, d, table).value
                )

    def test_exact_limit(self):
        with pytest.raises(ExactLimitExceeded):
            sym_moment_direct(263, 2)


class TestAppendix8:
    def test_needs_completed(self):
        with pytest.raises(WrongConvention):
            sym_moment_appendix8(5, power_sums_exact(5, 8))

    def test_agrees_with_direct(self):
        for p in primes_in_range(2, 31):
            completed = power_sums_exact(p, 8, COMPLETED)
            assert (
                sym_moment_appendix8(p, completed).value
                == sym_moment_direct(p, 8).value
            )

    def test_feeds_degree8_pins(self):
        t5 = power_sums_exact(5, 8, COMPLETED)
        t7 = power_sums_exact(7, 8, COMPLETED)
        m5 = sym_moment_appendix8(5, t5).value
        m7 = sym_moment_appendix8(7, t7).value
        assert (-m5 - 1 - 5**4) // 5**2 == -66
        assert (-m7 - 1 - 7**4) // 7**2 == 176


class TestTensorMoment:
    def test_sign_convention_n2_d1(self):
        for p in (3, 5, 7):
            assert tensor_moment(p, 2, 1) == -1  # = -S_1

    def test_degree_zero(self):
        assert tensor_moment(11, 3, 0) == 10

    def test_p3_n3_brute_force(self):
        p = 3
        total = CycInt.zero(p)
        for a in range(1, p):
            brute = [0] * p
            for x in range(1, p):
                for y in range(1, p):
                    for z in range(1, p):
                        if x * y * z % p == a:
                            brute[(x + y + z) % p] += 1
            total = total + CycInt.from_coeffs(p, brute)
        # (-1)**(n-1) = +1 at n = 3, so the signs drop out
        assert tensor_moment(p, 3, 1) == as_integer(total)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            tensor_moment(211, 100000, 1)


class TestLargePrimePaths:
    def test_float_matches_raised_exact_limit_at_263(self):
        # p = 263 sits above the default exact limit; the congruence path
        # must reproduce the exact values computed with a raised limit
        flt, _ = power_sums_float_auto(263, 4)
        exact = power_sums_exact(263, 4, COMPLETED, exact_limit=263)
        assert flt.values == exact.values

    def test_ntt_backend_in_pipeline_at_521(self):
        from klmoments.cyclotomic import set_ntt_threshold

        set_ntt_threshold(512)
        try:
            t = power_sums_exact(521, 2, exact_limit=521)
        finally:
            set_ntt_threshold(None)
        assert t.values[1] == 1
        assert t.values[2] == 521 * 521 - 521 - 1


class TestMomentSelector:
    def test_exact_route(self):
        mv = sym_moment(5, 8)
        assert mv.value == sym_moment_direct(5, 8).value
        assert mv.method == "girard-exact"

    def test_float_route(self):
        mv = sym_moment(11, 4, exact_limit=7)
        assert mv.method == "girard-float"
        assert mv.value == -1 - 121

    def test_supplied_table_used(self):
        t = power_sums_exact(7, 8)
        mv = sym_moment(7, 6, table=t)
        assert mv.value == sym_moment_girard(7, 6, t).value
