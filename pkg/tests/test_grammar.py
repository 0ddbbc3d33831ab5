import re
from itertools import chain, combinations
from math import comb

import pytest

from fusionplan import (
    GroupIndexing,
    SensitivityDescriptor,
    count_descriptors,
    derive,
    enumerate_descriptors,
    format_descriptor,
)

EIGHT_TWO_DB = [
    "{}",
    "{DB1}",
    "{DB2}",
    "{DB1; DB2}",
    "{[DB1,DB2]}",
    "{DB1; [DB1,DB2]}",
    "{DB2; [DB1,DB2]}",
    "{DB1; DB2; [DB1,DB2]}",
]


def brute_force_descriptors(m):
    """Oracle: every subset of the non-empty groups over {1..m}."""
    universe = [frozenset(c) for k in range(1, m + 1)
                for c in combinations(range(1, m + 1), k)]
    subsets = chain.from_iterable(
        combinations(universe, r) for r in range(len(universe) + 1))
    return {format_descriptor(SensitivityDescriptor(s, m=m)) for s in subsets}


class TestEnumeration:
    def test_two_databases_exact_listing(self):
        assert [str(d) for d in enumerate_descriptors(2)] == EIGHT_TWO_DB

    def test_one_database(self):
        assert [str(d) for d in enumerate_descriptors(1)] == ["{}", "{DB1}"]

    def test_three_databases_against_brute_force(self):
        out = enumerate_descriptors(3)
        assert len(out) == 128
        assert {str(d) for d in out} == brute_force_descriptors(3)

    def test_four_databases_against_brute_force(self):
        out = enumerate_descriptors(4)
        assert len(out) == count_descriptors(4) == 32768
        assert {str(d) for d in out} == brute_force_descriptors(4)

    def test_no_duplicates(self):
        out = enumerate_descriptors(3)
        assert len({str(d) for d in out}) == len(out)

    def test_guard(self):
        with pytest.raises(ValueError):
            enumerate_descriptors(0)
        with pytest.raises(ValueError):
            enumerate_descriptors(6)


class TestCounts:
    @pytest.mark.parametrize("m,expected", [(1, 2), (2, 8), (3, 128), (4, 32768)])
    def test_closed_form(self, m, expected):
        assert count_descriptors(m) == expected
        assert len(enumerate_descriptors(m)) == expected

    def test_guard(self):
        with pytest.raises(ValueError):
            count_descriptors(0)
        with pytest.raises(ValueError):
            count_descriptors(6)


class TestGroupIndexing:
    def test_sizes(self):
        gi = GroupIndexing(4)
        for k in range(1, 5):
            groups = gi.groups_of_size(k)
            assert len(groups) == comb(4, k)
            ordered = [tuple(sorted(g)) for g in groups]
            assert ordered == sorted(ordered)

    def test_rank_round_trip(self):
        gi = GroupIndexing(3)
        assert gi.rank(frozenset({2})) == (1, 2)
        assert gi.rank(frozenset({1, 3})) == (2, 2)
        assert gi.variable(frozenset({1, 2, 3})) == "3d1"


VARIABLE = re.compile(r"(\d+)d(\d+)")


def replay(trace):
    """Oracle: re-apply each recorded production textually."""
    form = "S"
    for production, result in trace.steps:
        lhs, rhs = production.split(" -> ")
        if form == "S":
            assert lhs == "S"
            form = rhs
        else:
            assert form.count(lhs) == 1, (form, lhs)
            form = form.replace(lhs, rhs, 1)
        assert form == result
    return form


class TestDerivation:
    def test_single_group_trace(self):
        trace = derive(SensitivityDescriptor([{1}], m=1))
        assert [s for _, s in trace.steps] == ["{}", "{1d1}", "{DB1}"]
        assert trace.steps[0][0] == "S -> {}"
        assert trace.steps[-1][0] == "1d1 -> DB1"

    def test_null_descriptor_trace(self):
        trace = derive(SensitivityDescriptor())
        assert trace.steps == (("S -> {}", "{}"),)

    def test_two_group_trace(self):
        d = SensitivityDescriptor([{1}, {1, 2}])
        trace = derive(d)
        # insert, extend, and one terminal replacement per group
        assert len(trace.steps) == 5
        assert trace.final_form == "{DB1; [DB1,DB2]}" == format_descriptor(d)

    def test_replay_all_two_db_descriptors(self):
        for d in enumerate_descriptors(2):
            trace = derive(d, m=2)
            assert replay(trace) == format_descriptor(d)

    def test_replay_sample_three_db_descriptors(self):
        for d in enumerate_descriptors(3)[::7]:
            trace = derive(d, m=3)
            assert replay(trace) == format_descriptor(d)

    def test_variable_order_side_condition(self):
        """Emitted variables have non-decreasing size; index strictly
        increases within one size."""
        for d in enumerate_descriptors(3)[::5]:
            trace = derive(d, m=3)
            final_sentential = None
            for _, form in trace.steps:
                if VARIABLE.search(form):
                    final_sentential = form
            if final_sentential is None:
                continue
            ranks = [(int(k), int(i)) for k, i in VARIABLE.findall(final_sentential)]
            for (k1, i1), (k2, i2) in zip(ranks, ranks[1:]):
                assert k2 >= k1
                if k2 == k1:
                    assert i2 > i1
