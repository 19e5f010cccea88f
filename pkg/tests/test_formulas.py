import pytest
from hypothesis import given, strategies as st

from conflict_metrics import (
    FALSE,
    TRUE,
    And,
    FormulaParseError,
    Implies,
    KbParseError,
    KnowledgeBase,
    Not,
    Or,
    Var,
    format_formula,
    kb_to_text,
    parse_formula,
    parse_kb,
)

names = st.sampled_from(["a", "b", "c", "x_1", "P0"])
atoms = st.one_of(names.map(Var), st.sampled_from([TRUE, FALSE]))
formulas = st.recursive(
    atoms,
    lambda kids: st.one_of(
        kids.map(Not),
        st.tuples(kids, kids).map(lambda t: And(*t)),
        st.tuples(kids, kids).map(lambda t: Or(*t)),
        st.tuples(kids, kids).map(lambda t: Implies(*t)),
    ),
    max_leaves=12,
)


class TestParse:
    def test_conjunction_with_negation(self):
        assert parse_formula("a & !a") == And(Var("a"), Not(Var("a")))

    def test_negated_atom_binds_tighter_than_and(self):
        assert parse_formula("!c & d") == And(Not(Var("c")), Var("d"))

    def test_implication_is_right_associative(self):
        assert parse_formula("a -> b -> c") == Implies(Var("a"), Implies(Var("b"), Var("c")))

    def test_precedence_chain(self):
        f = parse_formula("!a & b | c -> d")
        assert f == Implies(Or(And(Not(Var("a")), Var("b")), Var("c")), Var("d"))

    def test_and_or_associate_left(self):
        assert parse_formula("a & b & c") == And(And(Var("a"), Var("b")), Var("c"))
        assert parse_formula("a | b | c") == Or(Or(Var("a"), Var("b")), Var("c"))

    def test_tilde_and_bang_both_negate(self):
        assert parse_formula("~a") == parse_formula("!a") == Not(Var("a"))

    def test_constants_and_identifiers(self):
        assert parse_formula("true") is TRUE
        assert parse_formula("false") is FALSE
        assert parse_formula("True") == Var("True")  # only lowercase spellings are constants

    def test_parentheses_override(self):
        assert parse_formula("(a -> b) -> c") == Implies(Implies(Var("a"), Var("b")), Var("c"))

    def test_empty_input(self):
        with pytest.raises(FormulaParseError):
            parse_formula("   ")

    def test_error_carries_position(self):
        with pytest.raises(FormulaParseError) as err:
            parse_formula("a & $b")
        assert err.value.position == 4

    def test_trailing_garbage(self):
        with pytest.raises(FormulaParseError):
            parse_formula("a b")

    def test_unclosed_paren(self):
        with pytest.raises(FormulaParseError):
            parse_formula("(a & b")

    @given(formulas)
    def test_print_parse_round_trip(self, f):
        assert parse_formula(format_formula(f)) == f


class TestKnowledgeBase:
    def test_two_formulas(self):
        kb = parse_kb("a\n!a")
        assert len(kb) == 2
        assert kb.formula(1) == Var("a")
        assert kb.formula(2) == Not(Var("a"))

    def test_duplicates_dropped_keeping_first(self):
        kb = parse_kb("a\na")
        assert len(kb) == 1

    def test_structural_not_semantic_dedup(self):
        kb = parse_kb("a & b\nb & a")
        assert len(kb) == 2

    def test_comments_and_blanks(self):
        kb = parse_kb("# header\n\na  # trailing\n!a\n")
        assert len(kb) == 2

    def test_error_carries_line_number(self):
        with pytest.raises(KbParseError) as err:
            parse_kb("a\nb &\nc")
        assert err.value.line == 2

    def test_indices_are_stable(self, example2_kb):
        assert len(example2_kb) == 9
        assert example2_kb.formula(5) == And(Not(Var("c")), Var("d"))
        assert example2_kb.formula(7) == Var("c")

    def test_index_validation(self):
        kb = parse_kb("a\nb")
        with pytest.raises(IndexError):
            kb.formula(3)
        with pytest.raises(IndexError):
            kb.check_indices({0})

    def test_restrict_reindexes(self, example2_kb):
        sub = example2_kb.restrict({2, 7, 9})
        assert len(sub) == 3
        assert sub.formula(1) == Not(Var("a"))
        assert sub.formula(3) == And(Var("e"), Var("d"))

    def test_union_appends_new_formulas(self):
        k1 = parse_kb("a\n!a")
        k2 = parse_kb("!a\nb")
        merged = k1.union(k2)
        assert len(merged) == 3
        assert merged.formula(3) == Var("b")

    def test_variables_sorted(self, example2_kb):
        assert example2_kb.variables() == ("a", "b", "c", "d", "e")

    def test_kb_text_round_trip(self, example6_kb):
        assert parse_kb(kb_to_text(example6_kb)) == example6_kb

    def test_immutable(self):
        kb = parse_kb("a")
        with pytest.raises(AttributeError):
            kb.formulas = ()
