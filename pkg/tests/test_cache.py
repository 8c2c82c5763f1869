import json

import pytest

from klmoments.cache import PowerSumStore, resolve_cache_dir
from klmoments.errors import CacheMismatch
from klmoments.moments import (
    COMPLETED,
    METHOD_EXACT,
    METHOD_FLOAT,
    RESTRICTED,
    PowerSumTable,
    power_sums_exact,
)


@pytest.fixture()
def store(tmp_path):
    return PowerSumStore(tmp_path)


class TestRoundTrip:
    def test_store_and_load(self, store):
        table = power_sums_exact(7, 6)
        store.store(table)
        loaded = store.load(7, RESTRICTED, METHOD_EXACT)
        assert loaded == table

    def test_missing_returns_none(self, store):
        assert store.load(11, RESTRICTED, METHOD_EXACT) is None

    def test_decimal_string_values(self, store):
        path = store.store(power_sums_exact(7, 3))
        doc = json.loads(path.read_text())
        assert all(isinstance(e["value"], str) for e in doc["entries"])
        assert doc["schema_version"] == 1


class TestCorruption:
    def test_truncated_file_discarded(self, store, caplog):
        path = store.store(power_sums_exact(5, 3))
        path.write_text(path.read_text()[:40])
        with caplog.at_level("WARNING"):
            assert store.load(5, RESTRICTED, METHOD_EXACT) is None
        assert "discarding corrupt cache entry" in caplog.text
        assert not path.exists()

    def test_tampered_value_fails_checksum(self, store, caplog):
        path = store.store(power_sums_exact(5, 3))
        doc = json.loads(path.read_text())
        doc["entries"][0]["value"] = "999"
        path.write_text(json.dumps(doc))
        with caplog.at_level("WARNING"):
            assert store.load(5, RESTRICTED, METHOD_EXACT) is None
        assert "checksum" in caplog.text


class TestCrossMethodConsistency:
    def test_agreeing_records_load(self, store):
        exact = power_sums_exact(7, 4)
        store.store(exact)
        store.store(
            PowerSumTable(
                7, COMPLETED,
                exact.to_convention(COMPLETED).values,
                METHOD_FLOAT,
            )
        )
        assert store.load(7, RESTRICTED, METHOD_EXACT) is not None

    def test_disagreeing_records_fail_loudly(self, store):
        exact = power_sums_exact(7, 4)
        store.store(PowerSumTable(7, RESTRICTED, exact.values, METHOD_EXACT))
        wrong = dict(exact.values)
        wrong[2] += 1
        store.store(PowerSumTable(7, RESTRICTED, wrong, METHOD_FLOAT))
        with pytest.raises(CacheMismatch):
            store.load(7, RESTRICTED, METHOD_EXACT)

    def test_cross_convention_disagreement_detected(self, store):
        # exact tables persist restricted, float tables completed; the
        # agreement check must still compare them
        exact = power_sums_exact(7, 4)
        store.store(exact)
        wrong = dict(exact.to_convention(COMPLETED).values)
        wrong[3] -= 7**2  # same congruence class, different value
        store.store(PowerSumTable(7, COMPLETED, wrong, METHOD_FLOAT))
        with pytest.raises(CacheMismatch):
            store.load(7, RESTRICTED, METHOD_EXACT)


class TestGetOrCompute:
    def test_computes_once(self, store):
        calls = []

        def compute():
            calls.append(1)
            return power_sums_exact(11, 5)

        first = store.get_or_compute(11, 5, RESTRICTED, METHOD_EXACT, compute)
        second = store.get_or_compute(11, 5, RESTRICTED, METHOD_EXACT, compute)
        assert first == second and len(calls) == 1

    def test_extends_partial_table(self, store):
        store.store(power_sums_exact(11, 3))
        table = store.get_or_compute(
            11, 6, RESTRICTED, METHOD_EXACT, lambda: power_sums_exact(11, 6)
        )
        assert set(table.values) == set(range(1, 7))

    def test_recompute_disagreement_raises(self, store):
        store.store(PowerSumTable(11, RESTRICTED, {1: 999}, METHOD_EXACT))
        with pytest.raises(CacheMismatch):
            store.get_or_compute(
                11, 2, RESTRICTED, METHOD_EXACT, lambda: power_sums_exact(11, 2)
            )


class TestCacheDirResolution:
    def test_flag_beats_env(self, monkeypatch):
        monkeypatch.setenv("KLMOMENTS_CACHE_DIR", "/env/path")
        assert str(resolve_cache_dir("/flag/path")) == "/flag/path"
        assert str(resolve_cache_dir(None)) == "/env/path"

    def test_default(self, monkeypatch):
        monkeypatch.delenv("KLMOMENTS_CACHE_DIR", raising=False)
        assert str(resolve_cache_dir(None)) == ".klmoments-cache"
