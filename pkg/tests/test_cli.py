import json
import subprocess
import sys
from pathlib import Path

import pytest

from wstlpref import load_result, load_signals, load_pairs, save_preferences
from wstlpref.cli import main


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def project(tmp_path_factory):
    """simulate -> pairs -> synthetic preferences, shared by the tests."""
    root = tmp_path_factory.mktemp("cli")
    sig = root / "stop.json"
    assert run_cli("simulate", "--scenario", "stop", "--n", "30",
                   "--seed", "5", "--out", sig) == 0
    pairs = root / "pairs.json"
    assert run_cli("pairs", "--signals", sig, "--n-pairs", "10",
                   "--threshold", "2.0", "--seed", "5", "--out", pairs) == 0
    pairset, _ = load_pairs(pairs)
    signals, meta = load_signals(sig)
    from wstlpref import WeightValuation, parse, parameter_slots, preferences_from_valuation
    import numpy as np

    phi = parse(meta["formula"])
    rng = np.random.default_rng(0)
    n = len(parameter_slots(phi, meta["horizon"]))
    hidden = WeightValuation.from_vector(phi, 1 - rng.random(n), meta["horizon"])
    ds = preferences_from_valuation(signals, pairset.ids(), phi, hidden,
                                    meta["horizon"])
    prefs = root / "prefs.json"
    save_preferences(prefs, list(ds.pairs), signals_file="stop.json")
    return root, sig, pairs, prefs


class TestSimulate:
    def test_writes_dataset_and_manifest(self, project):
        root, sig, _, _ = project
        signals, meta = load_signals(sig)
        assert len(signals) == 30
        assert meta["scenario"] == "stop" and meta["formula"].startswith("(F G")
        manifest = json.loads((root / "stop.json.manifest.json").read_text())
        assert manifest["n"] == 30 and 0 < manifest["acceptance_rate"] <= 1

    def test_seed_reproducibility(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_cli("simulate", "--scenario", "stop", "--n", "4", "--seed", "9", "--out", a)
        run_cli("simulate", "--scenario", "stop", "--n", "4", "--seed", "9", "--out", b)
        assert a.read_bytes() == b.read_bytes()

    def test_n_zero_is_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit):
            run_cli("simulate", "--scenario", "stop", "--n", "0",
                    "--out", tmp_path / "x.json")

    def test_violating_dataset(self, tmp_path):
        out = tmp_path / "viol.json"
        assert run_cli("simulate", "--scenario", "pedestrian", "--n", "3",
                       "--violating", "--seed", "1", "--out", out) == 0
        signals, meta = load_signals(out)
        assert meta["satisfying"] is False and len(signals) == 3


class TestLearn:
    def test_rs(self, project, capsys):
        root, _, _, prefs = project
        out = root / "rs.json"
        code = run_cli("learn", "--method", "rs", "--prefs", prefs,
                       "--n-samples", "200", "--seed", "1", "--out", out)
        assert code == 0
        doc = load_result(out)
        assert doc["solver"] == "random_sampling"
        assert doc["satisfied_pairs"] >= 8
        assert "satisfied" in capsys.readouterr().out

    def test_gb_zero_iters(self, project):
        root, _, _, prefs = project
        out = root / "gb0.json"
        assert run_cli("learn", "--method", "gb", "--prefs", prefs, "--restarts", "2",
                       "--max-iters", "0", "--seed", "1", "--out", out) == 0
        assert load_result(out)["solver"] == "gradient"

    def test_missing_file_nonzero_exit(self, tmp_path):
        code = run_cli("learn", "--method", "rs", "--prefs", tmp_path / "nope.json",
                       "--out", tmp_path / "r.json")
        assert code == 1

    def test_config_file_with_flag_override(self, project):
        root, _, _, prefs = project
        cfg = root / "cfg.json"
        cfg.write_text(json.dumps({"n_samples": 50, "seed": 3}))
        out = root / "rs2.json"
        assert run_cli("learn", "--method", "rs", "--prefs", prefs, "--config", cfg,
                       "--n-samples", "60", "--out", out) == 0
        assert load_result(out)["config"].n_samples == 60
        assert load_result(out)["config"].seed == 3

    def test_unknown_config_field(self, project):
        root, _, _, prefs = project
        cfg = root / "bad.json"
        cfg.write_text(json.dumps({"nsamples": 50}))
        with pytest.raises(SystemExit):
            run_cli("learn", "--method", "rs", "--prefs", prefs, "--config", cfg,
                    "--out", root / "x.json")


class TestEval:
    def test_table_and_json(self, project, capsys):
        root, _, _, prefs = project
        rs = root / "rs.json"
        if not rs.exists():
            run_cli("learn", "--method", "rs", "--prefs", prefs,
                    "--n-samples", "200", "--seed", "1", "--out", rs)
        out = root / "eval.json"
        code = run_cli("eval", "--results", rs, "--prefs", prefs, "--splits-seed", "0",
                       "--n-splits", "3", "--out", out)
        assert code == 0
        text = capsys.readouterr().out
        assert "STL" in text and "RS" in text and "BT" in text
        doc = json.loads(out.read_text())
        methods = [r["method"] for r in doc["rows"]]
        assert methods == ["STL", "RS", "BT"]
        for row in doc["rows"]:
            assert 0.0 <= row["test"] <= 1.0 and 0.0 <= row["train"] <= 1.0

    def test_rs_at_least_stl_on_train(self, project):
        root, _, _, prefs = project
        doc = json.loads((root / "eval.json").read_text())
        by = {r["method"]: r for r in doc["rows"]}
        assert by["RS"]["train"] >= by["STL"]["train"]


class TestRobustnessCmd:
    def test_unit_value(self, project, capsys):
        _, sig, _, _ = project
        assert run_cli("robustness", "--signals", sig, "--name", "stop_sat_000") == 0
        value = float(capsys.readouterr().out.strip())
        assert value > 0

    def test_per_node_stable(self, project, capsys):
        _, sig, _, _ = project
        run_cli("robustness", "--signals", sig, "--name", "stop_sat_000", "--per-node")
        first = capsys.readouterr().out
        run_cli("robustness", "--signals", sig, "--name", "stop_sat_000", "--per-node")
        assert capsys.readouterr().out == first
        assert first.startswith("semantics: traditional")

    def test_learned_weights(self, project, capsys):
        root, sig, _, _ = project
        assert run_cli("robustness", "--signals", sig, "--name", "stop_sat_001",
                       "--weights", root / "rs.json") == 0
        assert float(capsys.readouterr().out.strip()) > 0

    def test_unknown_name(self, project):
        _, sig, _, _ = project
        with pytest.raises(SystemExit):
            run_cli("robustness", "--signals", sig, "--name", "ghost")


class TestNormalizeCmd:
    def test_output_in_domain(self, project):
        root, _, _, _ = project
        out = root / "rsn.json"
        assert run_cli("normalize", "--result", root / "rs.json", "--out", out) == 0
        doc = load_result(out)
        vals = list(doc["valuation"].values.values())
        assert all(0 < v <= 1 for v in vals)
        assert doc["diagnostics"]["renormalized"] is True


class TestEntryPoint:
    def test_console_script(self):
        out = subprocess.run([sys.executable, "-m", "wstlpref.cli", "--help"],
                             capture_output=True, text=True)
        assert out.returncode == 0
        assert "simulate" in out.stdout
