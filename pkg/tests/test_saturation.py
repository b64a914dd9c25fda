import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spotplan import (
    InstanceSpec,
    Kind,
    SaturationTable,
    load_saturation,
    min_cpu_count,
    n_sat_lookup,
)

TABLE_V = {0.3: 3, 1.7: 12, 5: 16, 10: 20, 12.5: 24, 15: 24, 25: 28, 30: 32}


def inst(bw, kind=Kind.GPU, name="x"):
    return InstanceSpec(
        name=name, kind=kind, od_price="1", spot_price="0.5", network_bw=bw,
        eflops=100 if kind is Kind.GPU else 0, memory=16,
    )


def test_exact_keys(sat_table):
    for bw, expected in TABLE_V.items():
        assert n_sat_lookup(sat_table, inst(bw), inst(bw, Kind.CPU, "y")) == expected


def test_bottleneck_is_min_bandwidth(sat_table):
    assert n_sat_lookup(sat_table, inst(25), inst(1.7, Kind.CPU, "y")) == 12
    assert n_sat_lookup(sat_table, inst(1.7), inst(25, Kind.CPU, "y")) == 12


def test_floor_between_keys(sat_table):
    assert n_sat_lookup(sat_table, inst(11), inst(11, Kind.CPU, "y")) == 20


def test_below_smallest_key(sat_table):
    assert n_sat_lookup(sat_table, inst(0.1), inst(0.1, Kind.CPU, "y")) == 3


def test_above_largest_key(sat_table):
    assert n_sat_lookup(sat_table, inst(100), inst(100, Kind.CPU, "y")) == 32


def test_monotone_in_bandwidth(sat_table):
    probes = [0.1, 0.3, 1.0, 1.7, 3, 5, 8, 10, 11, 12.5, 14, 15, 20, 25, 29, 30, 50]
    values = [n_sat_lookup(sat_table, inst(bw), inst(bw, Kind.CPU, "y")) for bw in probes]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_empty_table_errors():
    empty = SaturationTable(())
    with pytest.raises(ValueError, match="empty"):
        n_sat_lookup(empty, inst(10), inst(10, Kind.CPU, "y"))


def test_table_invariants_enforced():
    with pytest.raises(ValueError):
        SaturationTable(((5, 16), (5, 18)))  # not strictly increasing
    with pytest.raises(ValueError):
        SaturationTable(((1, 10), (2, 8)))  # n_sat decreases
    with pytest.raises(ValueError):
        SaturationTable(((1, 0),))  # n_sat below 1


def test_load_saturation_document():
    table = load_saturation('{"entries": [[0.3, 3], [1.7, 12]]}')
    assert table.entries == ((0.3, 3), (1.7, 12))
    with pytest.raises(ValueError):
        load_saturation('{"rows": []}')


class TestMinCpuCount:
    def test_reference_sizing_example(self):
        assert min_cpu_count(32, 12) == 3

    def test_single_sender(self):
        assert min_cpu_count(1, 3) == 1

    def test_exact_multiple_needs_one_more(self):
        # 24/2 = 12 is not strictly below 12, so three receivers are needed.
        assert min_cpu_count(24, 12) == 3

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            min_cpu_count(0, 3)
        with pytest.raises(ValueError):
            min_cpu_count(3, 0)

    @settings(max_examples=300, deadline=None)
    @given(n=st.integers(min_value=1, max_value=10**6), ns=st.integers(min_value=1, max_value=10**4))
    def test_minimality_property(self, n, ns):
        m = min_cpu_count(n, ns)
        assert m >= 1
        assert n / m < ns
        if m > 1:
            assert n / (m - 1) >= ns

    @settings(max_examples=200, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=1000),
        ns=st.integers(min_value=1, max_value=100),
    )
    def test_monotonicity(self, n, ns):
        assert min_cpu_count(n + 1, ns) >= min_cpu_count(n, ns)
        assert min_cpu_count(n, ns + 1) <= min_cpu_count(n, ns)
