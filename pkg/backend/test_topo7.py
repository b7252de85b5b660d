"""
Tests for the integer classifiers of Eschenburg and Witten-Kreck-Stolz spaces.
"""

import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import itertools

import pytest

from symplectic.errors import InputError, NonCoprimeError
from symplectic.topo7 import (
    EschenburgQuartet,
    TableRow,
    WKSPair,
    admissible,
    admissible_as_printed,
    admissible_naive,
    brute_force_smooth_structures_14,
    classify_wks,
    count_admissible_naive,
    enumerate_admissible,
    enumerate_smooth_structures_14,
    load_reference_table,
    smooth_structure_index,
    verify_reference_table,
    wks14_diffeomorphic,
    wks14_homeomorphic,
    wks_hypothesis,
)

BOX = [(-2, 2)] * 4


class TestAdmissible:
    @pytest.mark.parametrize("quartet,expected", [
        ((0, 0, 1, 2), True),
        ((-1, -1, -2, 0), True),
        ((1, 1, 1, 0), False),
        ((0, 0, 0, 0), False),
    ])
    def test_examples(self, quartet, expected):
        assert admissible(EschenburgQuartet(*quartet)) is expected

    def test_weights(self):
        assert EschenburgQuartet(1, 2, 3, 4).weights == ((1, 2, -3), (3, 4, -7))

    def test_naive_recount_agrees(self):
        for t in itertools.product(range(-2, 3), repeat=4):
            q = EschenburgQuartet(*t)
            assert admissible_naive(q) == admissible(q)


class TestEnumeration:
    def test_counts_agree(self):
        found = list(enumerate_admissible(BOX))
        assert len(found) == count_admissible_naive(BOX)
        assert all(admissible(q) for q in found)

    def test_lexicographic_order(self):
        found = [q.as_tuple() for q in enumerate_admissible(BOX)]
        assert found == sorted(found)

    def test_workers_do_not_change_the_result(self):
        assert list(enumerate_admissible(BOX, workers=4)) == list(enumerate_admissible(BOX))

    def test_empty_box(self):
        assert list(enumerate_admissible([(1, 0), (0, 1), (0, 1), (0, 1)])) == []

    def test_bad_bounds(self):
        with pytest.raises(InputError):
            enumerate_admissible([(0, 1)] * 3)


class TestReferenceTable:
    def setup_method(self):
        self.rows = load_reference_table()

    def test_table_loads(self):
        assert len(self.rows) == 28
        assert isinstance(self.rows[0], TableRow)

    def test_every_row_is_admissible(self):
        report = verify_reference_table(self.rows)
        assert report["success"], report["errors"]
        assert report["admissible"] == 28
        assert report["s1_distinct"] == 28

    def test_printed_conditions(self):
        report = verify_reference_table(self.rows)
        assert report["admissible_as_printed"] == 15
        assert sum(admissible_as_printed(r.quartet) for r in self.rows) == 15

    def test_bad_row_reported(self):
        rows = self.rows[:2] + [TableRow(EschenburgQuartet(1, 1, 1, 0), self.rows[2].s1)] + self.rows[3:]
        report = verify_reference_table(rows)
        assert not report["success"]
        assert report["admissible"] == 27


class TestWKS:
    @pytest.mark.parametrize("k,l,expected", [(1, 4, True), (1, 5, False), (1, 8, False), (1, 24, True), (5, 7, False)])
    def test_hypothesis(self, k, l, expected):
        assert wks_hypothesis(WKSPair(k, l)) is expected

    def test_homeomorphic_not_diffeomorphic(self):
        assert wks14_homeomorphic(33, 4)
        assert not wks14_diffeomorphic(33, 4)
        assert smooth_structure_index(33, 4) == 1

    def test_diffeomorphic(self):
        assert wks14_diffeomorphic(897, 4)
        assert smooth_structure_index(897, 4) == 0

    def test_non_coprime(self):
        with pytest.raises(NonCoprimeError):
            wks14_homeomorphic(2, 4)

    def test_index_needs_homeomorphism(self):
        with pytest.raises(InputError):
            smooth_structure_index(3, 4)

    def test_smooth_structures(self):
        structures = enumerate_smooth_structures_14()
        assert len(structures) == 28
        assert structures[0] == WKSPair(1, 4)
        assert structures[-1] == WKSPair(865, 4)
        assert brute_force_smooth_structures_14() == structures

    def test_classify(self):
        result = classify_wks(WKSPair(33, 4))
        assert result["hypothesis"]
        assert result["homeomorphic_to_M14"]
        assert not result["diffeomorphic_to_M14"]
        assert result["smooth_structure"] == 1
