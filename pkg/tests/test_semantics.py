import math

import numpy as np
import pytest

from wstlpref import (
    Channel,
    Signal,
    SoftConfig,
    TruncationError,
    WeightValuation,
    boolean_channel,
    debug_report,
    grad_weights,
    parameter_slots,
    parse,
    rho,
    soft_max,
    soft_min,
    soft_operand_gap,
    soft_wstl_robustness,
    wstl_robustness,
    wstl_robustness_batch,
)

from helpers import (
    example_formula,
    example_signal,
    example_valuation,
    random_instance,
    random_valuation,
)

INF = math.inf


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


class TestTraditionalRobustness:
    def test_example_value(self):
        assert rho(example_signal(), example_formula(), 0) == 2.0

    def test_true_is_infinite(self):
        s = example_signal()
        phi = parse("true")
        for t in range(4):
            assert rho(s, phi, 0 + t) == INF

    def test_always_example(self):
        assert rho(example_signal(), parse("G(s2>=0)"), 0) == 1.0

    def test_t_beyond_trace(self):
        with pytest.raises(ValueError):
            rho(example_signal(), parse("s1>=0"), 7)

    def test_window_beyond_trace(self):
        with pytest.raises(TruncationError):
            rho(example_signal(), parse("G[2,3](s2>=0)"), 2)

    def test_truncated_window(self):
        # [0, 10] window truncates to the trace end
        assert rho(example_signal(), parse("F[0,10](s2>=0)"), 0) == 2.0

    def test_until_empty_inner_window(self):
        # at t'=t the inner min runs over [t, t), i.e. no samples: +inf
        s = Signal([Channel("a"), Channel("b")], [[-5.0, -5.0], [3.0, 1.0]])
        assert rho(s, parse("(a>=0) U[0,0] (b>=0)"), 0) == 3.0

    def test_until_uses_strict_prefix(self):
        s = Signal([Channel("a"), Channel("b")], [[2.0, -1.0], [0.5, 4.0]])
        # t'=0: min(0.5, empty=inf) = 0.5 ; t'=1: min(4, a(0)=2) = 2
        assert rho(s, parse("(a>=0) U[0,1] (b>=0)"), 0) == 2.0

    def test_boolean_predicate_passthrough(self):
        s = Signal([Channel("p", "boolean")], [boolean_channel([True, False])])
        assert rho(s, parse("p"), 0) == INF
        assert rho(s, parse("p"), 1) == -INF
        assert rho(s, parse("!p"), 1) == INF


class TestWeightedRobustness:
    def test_example_value(self):
        s, phi = example_signal(), example_formula()
        assert wstl_robustness(s, phi, example_valuation(phi), 0) == 6.0

    def test_unit_weights_neutral_on_example(self):
        s, phi = example_signal(), example_formula()
        ones = WeightValuation.ones(phi, 3)
        assert wstl_robustness(s, phi, ones, 0) == rho(s, phi, 0)

    def test_rescaled_example(self):
        s, phi = example_signal(), example_formula()
        slots = parameter_slots(phi, 3)
        w = WeightValuation(
            dict(zip((sl.id for sl in slots), [0.5, 0.1, 1.0, 0.4, 0.5, 1.0]))
        )
        assert wstl_robustness(s, phi, w, 0) == 1.0

    def test_missing_slot(self):
        s, phi = example_signal(), example_formula()
        with pytest.raises(ValueError):
            wstl_robustness(s, phi, WeightValuation({"/#w0": 1.0}), 0)

    def test_nonpositive_weight_rejected_in_batch(self):
        s, phi = example_signal(), example_formula()
        params = np.ones((6, 1))
        params[2, 0] = 0.0
        with pytest.raises(ValueError):
            wstl_robustness_batch(s, phi, params, 0)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            sig, phi = random_instance(rng)
            h = sig.t_final
            n = len(parameter_slots(phi, h))
            params = 1.0 - rng.random((n, 7))
            batch = wstl_robustness_batch(sig, phi, params, 0, h)
            for j in range(7):
                w = WeightValuation.from_vector(phi, params[:, j], h)
                single = wstl_robustness(sig, phi, w, 0, h)
                assert batch[j] == single

    def test_pinned_weights_evaluate(self):
        s = example_signal()
        phi = parse("F[0,3]{1.5,0.3,3,1.2} (-s1 >= 0 &{1,2} s2 >= 0)")
        assert wstl_robustness(s, phi, WeightValuation({}), 0) == 6.0


class TestSoundnessProperties:
    def test_sign_consistency_and_unit_neutrality(self):
        rng = np.random.default_rng(101)
        for _ in range(300):
            sig, phi = random_instance(rng)
            h = sig.t_final
            hard = rho(sig, phi, 0)
            w = random_valuation(rng, phi, h)
            weighted = wstl_robustness(sig, phi, w, 0, h)
            assert _sign(weighted) == _sign(hard)
            ones = WeightValuation.ones(phi, h)
            assert wstl_robustness(sig, phi, ones, 0, h) == hard

    def test_root_homogeneity(self):
        from wstlpref import root_weight_slots

        rng = np.random.default_rng(55)
        for _ in range(60):
            sig, phi = random_instance(rng, need_weights=True)
            h = sig.t_final
            w = random_valuation(rng, phi, h)
            base = wstl_robustness(sig, phi, w, 0, h)
            for alpha in (0.5, 2.0, 10.0):
                scaled = dict(w.values)
                for slot in root_weight_slots(phi, h):
                    if slot.is_parameter:
                        scaled[slot.id] *= alpha
                r = wstl_robustness(sig, phi, WeightValuation(scaled), 0, h)
                if math.isinf(base):
                    assert r == base
                elif base == 0.0:
                    assert r == 0.0
                else:
                    assert abs(r - alpha * base) <= 1e-12 * abs(alpha * base)


class TestSoftPrimitives:
    def test_singleton_exact(self):
        assert soft_max([0.0], 7.0) == 0.0
        assert soft_min([3.25], 0.5) == 3.25

    def test_two_zeros(self):
        assert abs(soft_max([0.0, 0.0], 1.0) - math.log(2)) < 1e-12

    def test_large_beta_dominance(self):
        assert abs(soft_max([5.0, -5.0], 1e4) - 5.0) <= 1e-9

    def test_small_beta_heavy_smoothing(self):
        # (1/b) log(e^(b*1) + e^(-b*1)) at b=0.01
        expected = 100.0 * math.log(math.exp(0.01) + math.exp(-0.01))
        assert abs(soft_max([1.0, -1.0], 0.01) - expected) < 1e-9
        assert abs(expected - 69.3197179726) < 1e-6

    def test_min_is_reflected_max(self):
        xs = [0.3, -2.0, 1.7]
        assert soft_min(xs, 3.0) == -soft_max([-x for x in xs], 3.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            soft_max([], 1.0)

    def test_bounds(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            xs = rng.normal(0, 5, rng.integers(1, 8))
            beta = 10 ** rng.uniform(-1, 3)
            sm = soft_max(xs, beta)
            assert xs.max() <= sm <= xs.max() + math.log(len(xs)) / beta + 1e-12


class TestSoftRobustness:
    def test_example_converges(self):
        s, phi = example_signal(), example_formula()
        w = example_valuation(phi)
        soft = soft_wstl_robustness(s, phi, w, SoftConfig(beta=1e4), 0)
        assert abs(soft - 6.0) <= 1e-3

    def test_singleton_window_no_smoothing(self):
        s = Signal([Channel("a")], [[2.5, 0.0]])
        phi = parse("F[1,1](a>=0)")
        w = WeightValuation.from_vector(phi, [0.7], 1)
        assert soft_wstl_robustness(s, phi, w, SoftConfig(beta=0.5), 0) == 0.0

    def test_sentinel_replaces_infinity(self):
        s = Signal([Channel("p", "boolean")], [boolean_channel([True])])
        cfg = SoftConfig(beta=10.0, inf_sentinel=123.0)
        assert soft_wstl_robustness(s, parse("p"), WeightValuation({}), cfg, 0) == 123.0

    def test_convergence_bound_random(self):
        rng = np.random.default_rng(77)
        checked = 0
        while checked < 60:
            sig, phi = random_instance(rng)
            h = sig.t_final
            w = random_valuation(rng, phi, h)
            hard = wstl_robustness(sig, phi, w, 0, h)
            if not math.isfinite(hard):
                continue
            cfg = SoftConfig(beta=1e4)
            if soft_operand_gap(sig, phi, w, cfg, 0, h) < 1e-3:
                continue
            soft = soft_wstl_robustness(sig, phi, w, cfg, 0, h)
            assert abs(soft - hard) <= 1e-3 * (1.0 + abs(hard))
            checked += 1

    def test_beta_1e10_near_hard(self):
        # the example has tied operands, so the log-sum-exp bias log(n)/beta
        # survives at any beta; at 1e10 it is ~2e-10
        s, phi = example_signal(), example_formula()
        w = example_valuation(phi)
        assert abs(soft_wstl_robustness(s, phi, w, SoftConfig(beta=1e10), 0) - 6.0) <= 1e-9


class TestGradients:
    def test_min_selection(self):
        # conjunction picks the smaller weighted operand; at large beta the
        # gradient flows to the selected side's weight only
        s = Signal([Channel("a"), Channel("b")], [[1.0], [5.0]])
        phi = parse("a>=0 & b>=0")
        w = WeightValuation.from_vector(phi, [1.0, 1.0], 0)
        g = grad_weights(s, phi, w, SoftConfig(beta=200.0), 0)
        assert abs(g["/#w0"] - 1.0) < 1e-6
        assert abs(g["/#w1"]) < 1e-6

    def test_constant_slot_formula_empty_gradient(self):
        s = Signal([Channel("a"), Channel("b")], [[1.0], [5.0]])
        phi = parse("a>=0 &{1,1} b>=0")
        g = grad_weights(s, phi, WeightValuation({}), SoftConfig(beta=10.0), 0)
        assert g == {}

    def test_unused_slots_zero(self):
        # evaluation at t=0 with a bounded window never reads late entries
        s = Signal([Channel("a")], [[1.0, 2.0, 3.0, 4.0]])
        phi = parse("F[0,1](a>=0)")
        g = grad_weights(s, phi, WeightValuation.from_vector(phi, [1, 1], 3),
                         SoftConfig(beta=50.0), 0)
        assert set(g) == {"/#w0", "/#w1"}

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(31)
        cfg = SoftConfig(beta=50.0)
        checked = 0
        while checked < 40:
            sig, phi = random_instance(rng, max_depth=3)
            h = sig.t_final
            if not parameter_slots(phi, h):
                continue
            w = random_valuation(rng, phi, h)
            if soft_operand_gap(sig, phi, w, cfg, 0, h) < 1e-3:
                continue
            grads = grad_weights(sig, phi, w, cfg, 0, h)
            fd = {}
            for sid, val in w.values.items():
                step = 1e-6 * max(1.0, abs(val))
                up = dict(w.values)
                dn = dict(w.values)
                up[sid] += step
                dn[sid] -= step
                fd[sid] = (
                    soft_wstl_robustness(sig, phi, WeightValuation(up), cfg, 0, h)
                    - soft_wstl_robustness(sig, phi, WeightValuation(dn), cfg, 0, h)
                ) / (2 * step)
            scale = max(1.0, max(abs(v) for v in fd.values()))
            err = max(abs(grads[sid] - fd[sid]) for sid in fd) / scale
            assert err <= 1e-4, (err, [type(phi).__name__])
            checked += 1


class TestDebugReport:
    def test_golden(self):
        s = Signal(
            [Channel("x"), Channel("p", "boolean")],
            [[0.0, 1.0, 2.0, 3.0], boolean_channel([True, True, False, False])],
        )
        phi = parse("(3 - x >= 0) U (!p)")
        expected = (
            "semantics: traditional (all weights 1)\n"
            "trace length: 4\n"
            "/ until :: 2 2 inf inf\n"
            "/0 pred[x] :: 3 2 1 0\n"
            "/1 not :: -inf -inf inf inf\n"
            "/1/0 pred[p] :: inf inf -inf -inf\n"
        )
        assert debug_report(s, phi) == expected

    def test_weighted_header(self):
        s, phi = example_signal(), example_formula()
        report = debug_report(s, phi, example_valuation(phi))
        assert report.startswith("semantics: weighted\n")
        assert "/ eventually :: " in report
