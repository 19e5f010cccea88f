import pytest
from hypothesis import given, settings, strategies as st

from conflict_metrics import (
    GcnfFormatError,
    is_satisfiable,
    parse_kb,
    read_gcnf,
    to_clause_db,
    write_dimacs,
    write_gcnf,
)
from conflict_metrics.generate import generate_random_kb

from oracles import tt_consistent


class TestTranslation:
    def test_two_groups_both_selected_unsat(self):
        db = to_clause_db(parse_kb("a\n!a"))
        assert db.num_groups == 2
        assert not is_satisfiable(db, {1, 2}).satisfiable
        assert is_satisfiable(db, {1}).satisfiable

    def test_conjunction_group_forces_both(self):
        kb = parse_kb("a & d")
        db = to_clause_db(kb)
        res = is_satisfiable(db, {1})
        a, d = kb.variables().index("a") + 1, kb.variables().index("d") + 1
        assert res.model[a] and res.model[d]

    def test_selector_above_encoding_vars(self):
        db = to_clause_db(parse_kb("a & b\nc"))
        assert db.selector(1) == db.num_vars + 1
        assert all(abs(lit) <= db.num_vars for clause in db.clauses for lit in clause)

    def test_tautology_becomes_empty_group(self):
        db = to_clause_db(parse_kb("true\na"))
        assert db.num_groups == 2
        assert db.group_clauses(1) == []
        assert is_satisfiable(db, {1, 2}).satisfiable

    def test_false_group_is_empty_clause(self):
        db = to_clause_db(parse_kb("false\na"))
        assert db.group_clauses(1) == [()]
        assert not is_satisfiable(db, {1}).satisfiable
        assert is_satisfiable(db, {2}).satisfiable

    def test_constant_folding_inside(self):
        db = to_clause_db(parse_kb("a & true\nfalse | b"))
        assert is_satisfiable(db, {1, 2}).satisfiable

    def test_nine_formula_kb_has_nine_groups(self, example2_kb):
        db = to_clause_db(example2_kb)
        assert db.num_groups == 9
        assert not is_satisfiable(db, example2_kb.all_indices()).satisfiable
        assert not tt_consistent(example2_kb, example2_kb.all_indices())

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_every_subset_matches_truth_table(self, seed):
        kb = generate_random_kb(num_vars=3, num_formulas=4, seed=seed)
        db = to_clause_db(kb)
        n = len(kb)
        for sub in range(1 << n):
            subset = {i + 1 for i in range(n) if sub >> i & 1}
            assert is_satisfiable(db, subset).satisfiable == tt_consistent(kb, subset)


class TestGcnf:
    def test_header_and_shape(self):
        db = to_clause_db(parse_kb("a\n!a"))
        text = write_gcnf(db)
        assert text.splitlines()[0] == f"p gcnf {db.num_vars} {len(db.clauses)} 2"

    def test_round_trip(self, example2_kb):
        db = to_clause_db(example2_kb)
        back = read_gcnf(write_gcnf(db))
        assert back.num_vars == db.num_vars
        assert back.num_groups == 9
        assert back.clauses == db.clauses
        assert back.groups == db.groups

    def test_clause_line_format(self):
        db = read_gcnf("p gcnf 4 1 2\n{1} 3 -4 0\n")
        assert db.clauses == ((3, -4),)
        assert db.groups == (1,)

    def test_group_zero_is_accepted(self):
        db = read_gcnf("p gcnf 2 2 1\n{0} 1 2 0\n{1} -1 0\n")
        assert db.groups == (0, 1)

    def test_comments_ignored(self):
        db = read_gcnf("c hello\np gcnf 1 1 1\n{1} 1 0\n")
        assert db.clauses == ((1,),)

    @pytest.mark.parametrize(
        "text",
        [
            "p cnf 2 1 1\n{1} 1 0\n",  # wrong tag
            "p gcnf 2 1\n{1} 1 0\n",  # short header
            "{1} 1 0\n",  # clause before header
            "p gcnf 2 1 1\n1 0\n",  # missing group tag
            "p gcnf 2 1 1\n{2} 1 0\n",  # group out of range
            "p gcnf 2 1 1\n{1} 3 0\n",  # literal out of range
            "p gcnf 2 1 1\n{1} 1\n",  # missing terminator
            "p gcnf 2 2 1\n{1} 1 0\n",  # count mismatch
        ],
    )
    def test_malformed_inputs(self, text):
        with pytest.raises(GcnfFormatError):
            read_gcnf(text)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_random_db_round_trip(self, seed):
        kb = generate_random_kb(num_vars=4, num_formulas=5, seed=seed)
        db = to_clause_db(kb)
        assert read_gcnf(write_gcnf(db)) == db


class TestDimacs:
    def test_flattened_export(self):
        db = to_clause_db(parse_kb("a\n!a"))
        text = write_dimacs(db)
        lines = text.splitlines()
        assert lines[0] == f"p cnf {db.num_vars} {len(db.clauses)}"
        assert all(line.endswith(" 0") for line in lines[1:])

    def test_subset_export_drops_other_groups(self):
        db = to_clause_db(parse_kb("a\n!a"))
        only_first = write_dimacs(db, selected_groups={1})
        assert only_first.splitlines()[0].endswith(" 1")

    def test_bad_group_rejected(self):
        db = to_clause_db(parse_kb("a"))
        with pytest.raises(IndexError):
            write_dimacs(db, selected_groups={5})
