import numpy as np
import pytest

from wstlpref import (
    Always,
    And,
    Eventually,
    Interval,
    Not,
    Or,
    ParseError,
    Pred,
    TrueNode,
    Until,
    WeightValuation,
    levels,
    parameter_slots,
    parse,
    root_weight_slots,
    to_text,
    weight_slots,
)

from helpers import example_formula, random_instance


class TestParse:
    def test_example_shape(self):
        phi = parse("F[0,3](-s1 >= 0 & s2 >= 0)")
        assert isinstance(phi, Eventually)
        assert phi.interval == Interval(0, 3)
        assert isinstance(phi.child, And)
        assert len(weight_slots(phi)) == 6

    def test_double_negation_preserved(self):
        phi = parse("!(!(x>=0))")
        assert isinstance(phi, Not) and isinstance(phi.child, Not)
        assert isinstance(phi.child.child, Pred)
        assert weight_slots(phi) == []

    def test_until_blocks(self):
        phi = parse("(a>=0) U[1,2] (b>=0)")
        assert isinstance(phi, Until)
        slots = weight_slots(phi)
        assert len(slots) == 4  # two blocks of b-a+1 = 2

    def test_true_literal(self):
        assert isinstance(parse("true"), TrueNode)

    def test_implication_desugars(self):
        phi = parse("a>=0 => b>=0")
        assert isinstance(phi, Or)
        assert isinstance(phi.left, Not)
        assert len(weight_slots(phi)) == 2  # the disjunction owns the slots

    def test_le_normalizes_coefficients(self):
        phi = parse("v - 8 <= 0")
        assert isinstance(phi, Pred)
        assert dict(phi.fn.coeffs) == {"v": -1.0}
        assert phi.fn.offset == 8.0

    def test_bare_identifier_is_predicate(self):
        phi = parse("b")
        assert isinstance(phi, Pred)
        assert dict(phi.fn.coeffs) == {"b": 1.0}

    def test_precedence(self):
        phi = parse("a>=0 & b>=0 | c>=0")
        assert isinstance(phi, Or) and isinstance(phi.left, And)
        phi = parse("!a>=0 & b>=0")
        assert isinstance(phi, And) and isinstance(phi.left, Not)
        phi = parse("a>=0 U b>=0 & c>=0")  # U binds tighter than &
        assert isinstance(phi, And) and isinstance(phi.left, Until)

    def test_pinned_weights(self):
        phi = parse("a>=0 &{0.5,1.0} b>=0")
        assert phi.pinned == (0.5, 1.0)
        slots = weight_slots(phi)
        assert [s.value for s in slots] == [0.5, 1.0]
        assert parameter_slots(phi) == []

    def test_pinned_temporal_and_until(self):
        phi = parse("G[0,2]{1,2,3} (a>=0)")
        assert phi.pinned == (1.0, 2.0, 3.0)
        phi = parse("(a>=0) U[0,1]{1,2;3,4} (b>=0)")
        assert phi.pinned == ((1.0, 2.0), (3.0, 4.0))

    def test_pin_errors(self):
        with pytest.raises(ParseError):
            parse("a>=0 &{0.5} b>=0")  # wrong arity
        with pytest.raises(ParseError):
            parse("a>=0 &{0.5,-1} b>=0")  # nonpositive
        with pytest.raises(ParseError):
            parse("G{1,2} (a>=0)")  # unbounded cannot be pinned

    def test_malformed_interval(self):
        with pytest.raises(ParseError) as err:
            parse("F[3,1](a>=0)")
        assert "interval" in str(err.value)

    def test_syntax_error_has_position(self):
        with pytest.raises(ParseError) as err:
            parse("(a>=0 &")
        assert "line 1" in str(err.value)

    def test_reserved_words(self):
        with pytest.raises(ParseError):
            parse("U >= 0")


class TestPrinterRoundTrip:
    def test_example(self):
        phi = example_formula()
        assert parse(to_text(phi)) == phi

    def test_pinned_round_trip(self):
        phi = parse("(a>=0) U[0,1]{1,2;3,4} (b - 0.25 >= 0)")
        assert parse(to_text(phi)) == phi

    def test_random_round_trip(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            _, phi = random_instance(rng)
            again = parse(to_text(phi))
            assert again == phi, to_text(phi)


class TestSlots:
    def test_example_count_and_order(self):
        phi = example_formula()
        slots = weight_slots(phi, horizon=3)
        assert len(slots) == 6
        # diamond block first (closest to the root), then the conjunction
        assert [s.path for s in slots] == ["/"] * 4 + ["/0"] * 2

    def test_predicate_has_none(self):
        assert weight_slots(parse("x>=0")) == []

    def test_negation_unweighted(self):
        assert len(weight_slots(parse("! F[0,1](x>=0)"))) == 2

    def test_block_size_rule(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            sig, phi = random_instance(rng)
            h = sig.t_final
            for s in weight_slots(phi, h):
                assert s.id == f"{s.path}#w{s.index}"
            from wstlpref.formula import iter_nodes, node_block_length

            for _, node in iter_nodes(phi):
                n = node_block_length(node, h)
                if isinstance(node, (And, Or)):
                    assert n == 2
                elif isinstance(node, (Always, Eventually)):
                    itv = node.interval
                    assert n == (itv.b - itv.a + 1 if itv.bounded else h - itv.a + 1)
                elif isinstance(node, Until):
                    itv = node.interval
                    assert n == 2 * (itv.b - itv.a + 1 if itv.bounded else h - itv.a + 1)
                else:
                    assert n == 0

    def test_ids_stable_under_reparse(self):
        text = "F(G[0,2]((a>=0 & b>=0) | !p))"
        ids1 = [s.id for s in weight_slots(parse(text), 9)]
        ids2 = [s.id for s in weight_slots(parse(text), 9)]
        assert ids1 == ids2 and len(set(ids1)) == len(ids1)

    def test_unbounded_requires_horizon(self):
        with pytest.raises(ValueError):
            weight_slots(parse("F(a>=0)"))


class TestRootSlots:
    def test_example(self):
        phi = example_formula()
        assert [s.path for s in root_weight_slots(phi, 3)] == ["/"] * 4

    def test_negation_skipped(self):
        phi = parse("!F(-s1>=0 & s2>=0)")
        slots = root_weight_slots(phi, 3)
        assert len(slots) == 4 and all(s.path == "/0" for s in slots)

    def test_no_weighted_operator(self):
        with pytest.raises(ValueError):
            root_weight_slots(parse("x>=0"))


class TestLevels:
    def test_example(self):
        phi = example_formula()
        lv = levels(phi)
        assert sorted(lv) == [1, 2]
        assert isinstance(lv[1][0][1], Eventually)
        assert isinstance(lv[2][0][1], And)

    def test_flat_predicate(self):
        assert levels(parse("x>=0")) == {}

    def test_two_branches(self):
        phi = parse("(a>=0 & b>=0) | (c>=0 & d>=0)")
        lv = levels(phi)
        assert isinstance(lv[1][0][1], Or)
        assert len(lv[2]) == 2 and all(isinstance(n, And) for _, n in lv[2])

    def test_negation_does_not_open_level(self):
        phi = parse("!(a>=0 & !(b>=0 | c>=0))")
        lv = levels(phi)
        assert isinstance(lv[1][0][1], And) and isinstance(lv[2][0][1], Or)


class TestWeightValuation:
    def test_positive_only(self):
        with pytest.raises(ValueError):
            WeightValuation({"x": 0.0})
        with pytest.raises(ValueError):
            WeightValuation({"x": -1.0})

    def test_vector_round_trip(self):
        phi = example_formula()
        w = WeightValuation.from_vector(phi, [1, 2, 3, 4, 5, 6], 3)
        assert list(w.vector(phi, 3)) == [1, 2, 3, 4, 5, 6]

    def test_total_validation(self):
        phi = example_formula()
        with pytest.raises(ValueError):
            WeightValuation({"/#w0": 1.0}).validate_total(phi, 3)
