import math
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wstlpref import (
    Channel,
    PredicateFn,
    Signal,
    SignalError,
    append_indicator_channel,
    boolean_channel,
    euclidean_distance,
    load_signals,
    save_signals,
)

from helpers import example_signal

INF = math.inf


class TestSignalBasics:
    def test_value_at_example(self):
        s = example_signal()
        assert s.value_at("s1", 2) == -2.0

    def test_value_at_first_sample(self):
        s = example_signal()
        assert s.value_at("s1", 0) == s.samples[0, 0]

    def test_boolean_all_true(self):
        s = Signal([Channel("p", "boolean")], [boolean_channel([True] * 5)])
        assert s.value_at("p", 3) == INF

    def test_unknown_channel(self):
        with pytest.raises(SignalError):
            example_signal().value_at("nope", 0)

    def test_t_out_of_range(self):
        with pytest.raises(SignalError):
            example_signal().value_at("s1", 4)

    def test_no_nan(self):
        with pytest.raises(SignalError):
            Signal([Channel("a")], [[0.0, math.nan]])

    def test_boolean_channel_must_be_inf(self):
        with pytest.raises(SignalError):
            Signal([Channel("p", "boolean")], [[1.0, -1.0]])

    def test_immutable(self):
        s = example_signal()
        with pytest.raises(ValueError):
            s.samples[0, 0] = 5.0
        with pytest.raises(AttributeError):
            s.dt = 2.0


class TestIndicatorChannel:
    def test_velocity_example(self):
        s = Signal([Channel("v")], [[2.0, 1.0, 0.0, 0.0]])
        out = append_indicator_channel(s, PredicateFn.of({"v": 1.0}), "b")
        assert list(out.channel("b")) == [-INF, -INF, INF, INF]

    def test_identically_zero(self):
        s = Signal([Channel("v")], [[0.0, 0.0, 0.0]])
        out = append_indicator_channel(s, PredicateFn.of({"v": 1.0}), "b")
        assert list(out.channel("b")) == [INF, INF, INF]

    def test_tolerance(self):
        s = Signal([Channel("v")], [[1.0, 1e-10, 0.0]])
        out = append_indicator_channel(s, PredicateFn.of({"v": 1.0}), "b", eq_tol=1e-9)
        assert list(out.channel("b")) == [-INF, INF, INF]

    def test_name_collision(self):
        s = Signal([Channel("v")], [[0.0]])
        with pytest.raises(SignalError):
            append_indicator_channel(s, PredicateFn.of({"v": 1.0}), "v")

    def test_idempotent_content(self):
        s = Signal([Channel("v")], [[2.0, 0.0, 1e-12]])
        fn = PredicateFn.of({"v": 1.0})
        once = append_indicator_channel(s, fn, "b1")
        twice = append_indicator_channel(once, fn, "b2")
        assert np.array_equal(twice.channel("b1"), twice.channel("b2"))

    def test_requires_finite_predicate(self):
        s = Signal([Channel("p", "boolean")], [boolean_channel([True])])
        with pytest.raises(SignalError):
            append_indicator_channel(s, PredicateFn.of({"p": 1.0}), "b")


class TestPredicateFn:
    def test_affine(self):
        s = example_signal()
        fn = PredicateFn.of({"s1": 2.0, "s2": -1.0}, offset=0.5)
        np.testing.assert_allclose(fn.evaluate(s), 2 * s.channel("s1") - s.channel("s2") + 0.5)

    def test_boolean_sole_term(self):
        s = Signal(
            [Channel("x"), Channel("p", "boolean")],
            [[1.0, 2.0], boolean_channel([True, False])],
        )
        assert list(PredicateFn.of({"p": 1.0}).evaluate(s)) == [INF, -INF]
        assert list(PredicateFn.of({"p": -1.0}).evaluate(s)) == [-INF, INF]
        # a zero coefficient on the boolean channel is not a term
        np.testing.assert_allclose(
            PredicateFn.of({"x": 1.0, "p": 0.0}).evaluate(s), [1.0, 2.0]
        )

    def test_boolean_mixed_rejected(self):
        s = Signal(
            [Channel("x"), Channel("p", "boolean")],
            [[1.0, 2.0], boolean_channel([True, False])],
        )
        with pytest.raises(SignalError):
            PredicateFn.of({"x": 1.0, "p": 1.0}).evaluate(s)
        with pytest.raises(SignalError):
            PredicateFn.of({"p": 1.0}, offset=1.0).evaluate(s)


class TestEuclideanDistance:
    def test_identical(self):
        s = example_signal()
        assert euclidean_distance(s, s, ["s1", "s2"]) == 0.0

    def test_three_four_five(self):
        a = Signal([Channel("x")], [[0.0, 0.0]])
        b = Signal([Channel("x")], [[3.0, 4.0]])
        assert euclidean_distance(a, b, ["x"]) == 5.0

    def test_symmetry_simple(self):
        a = Signal([Channel("x")], [[1.0]])
        b = Signal([Channel("x")], [[-1.0]])
        assert euclidean_distance(a, b, ["x"]) == 2.0
        assert euclidean_distance(b, a, ["x"]) == 2.0

    def test_length_mismatch(self):
        a = Signal([Channel("x")], [[0.0, 1.0]])
        b = Signal([Channel("x")], [[0.0]])
        with pytest.raises(SignalError):
            euclidean_distance(a, b, ["x"])

    def test_boolean_channel_rejected(self):
        a = Signal([Channel("p", "boolean")], [boolean_channel([True])])
        with pytest.raises(SignalError):
            euclidean_distance(a, a, ["p"])

    def test_metric_on_random_triples(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            rows = rng.normal(0, 3, (3, 6))
            a, b, c = (Signal([Channel("x")], [r]) for r in rows)
            dab = euclidean_distance(a, b, ["x"])
            dba = euclidean_distance(b, a, ["x"])
            dac = euclidean_distance(a, c, ["x"])
            dcb = euclidean_distance(c, b, ["x"])
            assert dab == dba
            assert dab <= dac + dcb + 1e-12
            assert euclidean_distance(a, a, ["x"]) == 0.0


class TestPersistence:
    def test_round_trip(self, tmp_path):
        s = Signal(
            [Channel("x"), Channel("p", "boolean")],
            [[0.25, -1.5, 3e9], boolean_channel([True, False, True])],
            dt=0.1,
        )
        path = tmp_path / "sigs.json"
        save_signals(path, {"one": s}, meta={"scenario": "demo"})
        loaded, meta = load_signals(path)
        assert loaded["one"] == s
        assert meta["scenario"] == "demo"

    def test_inf_serialized_as_strings(self, tmp_path):
        s = Signal([Channel("p", "boolean")], [boolean_channel([True, False])])
        path = tmp_path / "sigs.json"
        save_signals(path, {"b": s})
        text = path.read_text()
        assert '"inf"' in text and '"-inf"' in text
        assert "Infinity" not in text

    def test_rejects_other_files(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(SignalError):
            load_signals(path)

    @settings(max_examples=25, deadline=None)
    @given(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
            min_size=1,
            max_size=20,
        )
    )
    def test_round_trip_any_reals(self, values):
        s = Signal([Channel("x")], [values])
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "s.json"
            save_signals(path, {"s": s})
            loaded, _ = load_signals(path)
        assert loaded["s"] == s
