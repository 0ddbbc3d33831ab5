import random

import pytest

from fusionplan import (
    Atom,
    Parallel,
    ParseError,
    ProcessFormula,
    Serial,
    format_formula,
    parse_formula,
)

TWO_DB_FORMULAS = [
    "B.E.F", "E.B.F", "E.F.(BxB)", "B.F.(ExE)",
    "F.(BxB).(ExE)", "F.(BxE).(ExB)", "F.(ExB).(BxE)", "F.(ExE).(BxB)",
]


class TestParseFormula:
    def test_bound_staged_formula(self):
        f = parse_formula("F.(ExB).(BxE){DB1;DB2}")
        assert isinstance(f.root, Serial)
        fuse, second, first = f.root.children
        assert fuse == Atom("F")
        assert second == Parallel([Atom("E"), Atom("B")])
        assert first == Parallel([Atom("B"), Atom("E")])
        assert f.binding == (1, 2)

    def test_single_atom(self):
        f = parse_formula("B")
        assert f.root == Atom("B")
        assert f.binding is None

    def test_nested_three_database_formula(self):
        f = parse_formula("F.((B.E.F)x(B.E))")
        fuse, par = f.root.children
        assert fuse == Atom("F")
        assert par.children[0] == Serial([Atom("B"), Atom("E"), Atom("F")])
        assert par.children[1] == Serial([Atom("B"), Atom("E")])

    def test_unicode_operators_accepted(self):
        ascii_form = parse_formula("F.(ExB).(BxE)")
        unicode_form = parse_formula("F∘(E×B)∘(B×E)")
        assert ascii_form == unicode_form

    def test_filter_args(self):
        f = parse_formula("E(1;[1,2])")
        assert f.root == Atom("E", (frozenset({1}), frozenset({1, 2})))
        assert parse_formula("E(1,[1,2])") == f

    def test_syntax_error_has_position(self):
        with pytest.raises(ParseError) as err:
            parse_formula("F.(Bx)")
        assert err.value.position == 5

    def test_empty_parallel_branch_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("(xB)")

    def test_redundant_parens_collapse(self):
        assert parse_formula("(B)") == parse_formula("B")
        assert parse_formula("((B.E))") == parse_formula("B.E")

    def test_duplicate_binding_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("B.E{DB1;DB1}")


class TestFormatFormula:
    def test_serial_chain(self):
        f = ProcessFormula(Serial([Atom("B"), Atom("E"), Atom("F")]))
        assert format_formula(f) == "B.E.F"

    def test_filter_with_args(self):
        f = ProcessFormula(Atom("E", (frozenset({1, 2}),)))
        assert format_formula(f) == "E([1,2])"

    def test_all_two_db_formulas_round_trip(self):
        for text in TWO_DB_FORMULAS:
            assert format_formula(parse_formula(text)) == text

    def test_unicode_output(self):
        f = parse_formula("F.(ExB).(BxE)")
        assert format_formula(f, unicode_ops=True) == "F∘(E×B)∘(B×E)"

    def test_binding_round_trip(self):
        text = "F.(ExB).(BxE){DB2;DB1}"
        assert format_formula(parse_formula(text)) == text


def random_formula(rng: random.Random, depth: int = 0) -> ProcessFormula:
    def node(depth, allow_parallel=True):
        roll = rng.random()
        if depth >= 3 or roll < 0.45:
            kind = rng.choice("BEF")
            if kind == "E" and rng.random() < 0.3:
                universe = [frozenset({1}), frozenset({2}), frozenset({1, 2}),
                            frozenset({2, 3})]
                count = rng.randint(1, 2)
                return Atom("E", tuple(rng.sample(universe, count)))
            return Atom(kind)
        if roll < 0.75:
            width = rng.randint(2, 3)
            return Serial([node(depth + 1) for _ in range(width)])
        width = rng.randint(2, 3)
        return Parallel([node(depth + 1) for _ in range(width)])

    binding = None
    if rng.random() < 0.3:
        size = rng.randint(1, 3)
        binding = tuple(rng.sample(range(1, 5), size))
    return ProcessFormula(node(depth), binding)


class TestRoundTripProperty:
    def test_random_ast_round_trips(self):
        rng = random.Random(2024)
        for _ in range(500):
            f = random_formula(rng)
            text = format_formula(f)
            assert parse_formula(text) == f, text

    def test_canonical_text_is_fixpoint(self):
        rng = random.Random(99)
        for _ in range(200):
            text = format_formula(random_formula(rng))
            assert format_formula(parse_formula(text)) == text
