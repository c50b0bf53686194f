"""Command-line entry points.

    wstlpref simulate    generate scenario trajectories into a dataset file
    wstlpref pairs       build a distance-filtered pair set from a dataset
    wstlpref elicit      serve the pairwise elicitation UI and API
    wstlpref learn       fit weights from preferences (random sampling / gradient)
    wstlpref eval        repeated-split accuracy table across methods
    wstlpref robustness  robustness of one signal (optionally per node)
    wstlpref normalize   rescale a learned valuation into (0, 1]^n

All commands are deterministic under --seed and write versioned JSON
artifacts; flags override any config-file field.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields as dataclass_fields
from dataclasses import replace
from pathlib import Path

import numpy as np

from .baselines import accuracy, bt_fit, bt_predict, make_splits, wstl_predictor
from .formula import WeightValuation, has_unbounded
from .learn import (
    LearnConfig,
    PreferenceDataset,
    gradient_solve,
    load_result,
    normalize_to_domain,
    random_sampling_solve,
    save_result,
)
from .parser import parse
from .scenarios import (
    PedestrianSpec,
    StopSignSpec,
    build_pairs,
    generate_dataset,
    load_pairs,
    load_preferences,
    save_pairs,
)
from .semantics import SoftConfig, debug_report, rho, soft_wstl_robustness, wstl_robustness
from .service import ElicitationServer
from .signals import load_signals, save_signals
from .store import load_session

FORMAT_FORMULA = "wstlpref-formula"
FORMAT_EVAL = "wstlpref-eval"
FORMAT_VERSION = 1


def _fail(message: str):
    print(f"error: {message}", file=sys.stderr)
    raise SystemExit(1)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _scenario_spec(args) -> StopSignSpec | PedestrianSpec:
    if args.scenario == "stop":
        kw = {}
        if args.x_stop is not None:
            kw["x_stop"] = args.x_stop
        if args.steps is not None:
            kw["n_steps"] = args.steps
        if args.dt is not None:
            kw["dt"] = args.dt
        return StopSignSpec(**kw)
    kw = {}
    if args.x_cross is not None:
        kw["x_cross"] = args.x_cross
    if args.v_lim is not None:
        kw["v_lim"] = args.v_lim
    if args.steps is not None:
        kw["n_steps"] = args.steps
    if args.dt is not None:
        kw["dt"] = args.dt
    return PedestrianSpec(**kw)


def cmd_simulate(args) -> None:
    if args.n <= 0:
        _fail("--n must be positive")
    spec = _scenario_spec(args)
    satisfying = not args.violating
    signals, rate = generate_dataset(spec, args.n, satisfying, args.seed)
    tag = "sat" if satisfying else "viol"
    named = {f"{args.scenario}_{tag}_{i:03d}": s for i, s in enumerate(signals)}
    markers = (
        {"scenario": "stop", "x_stop": spec.x_stop}
        if isinstance(spec, StopSignSpec)
        else {"scenario": "pedestrian", "x_cross": spec.x_cross, "v_lim": spec.v_lim}
    )
    meta = {
        "scenario": args.scenario,
        "satisfying": satisfying,
        "seed": args.seed,
        "formula": spec.formula_text(),
        "horizon": spec.horizon,
        "markers": markers,
    }
    save_signals(args.out, named, meta=meta)
    manifest = {
        "scenario": args.scenario,
        "spec": {f.name: getattr(spec, f.name) for f in dataclass_fields(spec)},
        "n": args.n,
        "satisfying": satisfying,
        "seed": args.seed,
        "acceptance_rate": rate,
    }
    with open(str(args.out) + ".manifest.json", "w") as f:
        json.dump(manifest, f, indent=1)
        f.write("\n")
    print(f"wrote {len(named)} signals to {args.out} (acceptance rate {rate:.1%})")


# ---------------------------------------------------------------------------
# pairs
# ---------------------------------------------------------------------------


def cmd_pairs(args) -> None:
    signals, meta = load_signals(args.signals)
    channels = [c.strip() for c in args.channels.split(",") if c.strip()]
    pairset = build_pairs(signals, args.n_pairs, args.threshold, channels, args.seed)
    pairset = replace(
        pairset,
        meta={"scenario": meta.get("scenario", ""), "markers": meta.get("markers", {}),
              "seed": args.seed},
    )
    rel = _relative_to(args.signals, args.out)
    save_pairs(args.out, pairset, signals_file=rel)
    print(f"wrote {len(pairset)} pairs to {args.out}")


def _relative_to(target, anchor) -> str:
    """Path of `target` relative to `anchor`'s directory when possible."""
    target, anchor = Path(target), Path(anchor)
    try:
        return str(target.resolve().relative_to(anchor.resolve().parent))
    except ValueError:
        return str(target.resolve())


# ---------------------------------------------------------------------------
# elicit
# ---------------------------------------------------------------------------


def cmd_elicit(args) -> None:
    host, _, port = args.bind.partition(":")
    server = ElicitationServer(
        pairs_file=args.pairs,
        session_file=args.session,
        host=host or "127.0.0.1",
        port=int(port or 0),
        seed=args.seed,
        assets_dir=args.assets,
    )
    print(f"session {server.state.session.id}: "
          f"{server.state.session.answered}/{server.state.session.total} answered")
    print(f"serving on {server.address} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("\nstopped")


# ---------------------------------------------------------------------------
# learn
# ---------------------------------------------------------------------------

_CONFIG_FLAGS = [f.name for f in dataclass_fields(LearnConfig)]


def _load_config(args) -> LearnConfig:
    base: dict = {}
    if args.config:
        with open(args.config) as f:
            base.update(json.load(f))
    for name in _CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            base[name] = value
    unknown = set(base) - set(_CONFIG_FLAGS)
    if unknown:
        _fail(f"unknown config fields: {sorted(unknown)}")
    return LearnConfig(**base)


def _load_formula(args, meta: dict):
    if getattr(args, "formula_text", None):
        text = args.formula_text
        horizon = getattr(args, "horizon", None)
    elif getattr(args, "formula_file", None):
        with open(args.formula_file) as f:
            doc = json.load(f)
        if doc.get("format") != FORMAT_FORMULA:
            _fail(f"{args.formula_file}: not a formula file")
        text, horizon = doc["text"], doc.get("horizon")
    elif meta.get("formula"):
        text, horizon = meta["formula"], meta.get("horizon")
    else:
        _fail("no formula: pass --formula-text/--formula-file or use a dataset "
              "generated by `wstlpref simulate`")
    phi = parse(text)
    if getattr(args, "horizon", None) is not None:
        horizon = args.horizon
    return phi, text, horizon


def _load_dataset(args) -> tuple[PreferenceDataset, dict, str]:
    """Preference pairs + signal store from --prefs or a completed --session."""
    if args.session:
        session = load_session(args.session)
        if not session.complete:
            _fail(f"session {session.id} incomplete: "
                  f"{session.answered}/{session.total} pairs answered")
        ordered = session.preferences()
        pairs_path = Path(args.session).parent / session.pairs_file \
            if not Path(session.pairs_file).is_absolute() else Path(session.pairs_file)
        _, signals_file = load_pairs(pairs_path)
        anchor = Path(pairs_path).parent
    else:
        ordered, signals_file = load_preferences(args.prefs)
        anchor = Path(args.prefs).parent
    if args.signals:
        signals_path = Path(args.signals)
    elif signals_file:
        signals_path = anchor / signals_file
    else:
        _fail("no signals file: the input does not reference one, pass --signals")
    signals, meta = load_signals(signals_path)
    return PreferenceDataset(tuple(ordered), signals), meta, str(signals_path)


def cmd_learn(args) -> None:
    dataset, meta, _ = _load_dataset(args)
    phi, text, horizon = _load_formula(args, meta)
    cfg = _load_config(args)
    solver = random_sampling_solve if args.method == "rs" else gradient_solve
    result = solver(dataset, phi, cfg)
    if has_unbounded(phi) and horizon is None:
        horizon = dataset.horizon(phi)
    save_result(args.out, result, formula_text=text, horizon=horizon, config=cfg)
    print(f"{result.solver}: satisfied {result.satisfied_pairs}/{len(dataset)} pairs "
          f"({result.margin_satisfied_pairs} above margin, "
          f"mean margin {result.mean_margin:.4g})")
    print(f"wrote {args.out}")


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _method_label(solver: str) -> str:
    return {"random_sampling": "RS", "gradient": "GB"}.get(solver, solver)


def cmd_eval(args) -> None:
    ordered, signals_file = load_preferences(args.prefs)
    if args.signals:
        signals_path = Path(args.signals)
    elif signals_file:
        signals_path = Path(args.prefs).parent / signals_file
    else:
        _fail("no signals file: the preference file does not reference one, pass --signals")
    signals, _ = load_signals(signals_path)
    dataset = PreferenceDataset(tuple(ordered), signals)
    if len(dataset) < 2:
        _fail("need at least two preference pairs to evaluate")

    results = [load_result(path) for path in args.results]
    base = results[0]
    phi = parse(base["formula"])
    horizon = base.get("horizon")
    splits = make_splits(len(dataset), n_splits=args.n_splits, ratio=args.ratio,
                         seed=args.splits_seed)

    def split_scores(fit):
        train_acc, test_acc = [], []
        for k, split in enumerate(splits):
            train = dataset.subset(split.train)
            test = dataset.subset(split.test)
            predictor = fit(train, k)
            train_acc.append(accuracy(predictor, train))
            test_acc.append(accuracy(predictor, test))
        return float(np.mean(train_acc)), float(np.mean(test_acc))

    rows = []
    unit = WeightValuation.ones(phi, horizon)
    rows.append(("STL", *split_scores(lambda train, k: wstl_predictor(phi, unit, horizon))))

    for doc in results:
        cfg = doc.get("config") or LearnConfig()
        solver = random_sampling_solve if doc["solver"] == "random_sampling" \
            else gradient_solve

        def refit(train, k, cfg=cfg, solver=solver):
            res = solver(train, phi, cfg, rng=cfg.seed + k)
            return wstl_predictor(phi, res.valuation, horizon)

        rows.append((_method_label(doc["solver"]), *split_scores(refit)))

    def bt(train, k):
        model = bt_fit(train, phi, lr=args.bt_lr, rng=args.splits_seed + k)
        return lambda s1, s2: bt_predict(model, s1, s2)

    rows.append(("BT", *split_scores(bt)))

    width = max(len("method"), max(len(r[0]) for r in rows))
    print(f"{'method'.ljust(width)}   train    test")
    for name, train, test in rows:
        print(f"{name.ljust(width)}   {train:.3f}    {test:.3f}")
    if args.out:
        doc = {
            "format": FORMAT_EVAL,
            "version": FORMAT_VERSION,
            "n_splits": args.n_splits,
            "ratio": args.ratio,
            "splits_seed": args.splits_seed,
            "rows": [{"method": n, "train": tr, "test": te} for n, tr, te in rows],
        }
        with open(args.out, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        print(f"wrote {args.out}")


# ---------------------------------------------------------------------------
# robustness / normalize
# ---------------------------------------------------------------------------


def cmd_robustness(args) -> None:
    signals, meta = load_signals(args.signals)
    if args.name not in signals:
        _fail(f"no signal named {args.name!r} in {args.signals}")
    sig = signals[args.name]
    phi, _, horizon = _load_formula(args, meta)
    if args.weights and args.weights != "unit":
        doc = load_result(args.weights)
        w = doc["valuation"]
        if horizon is None:
            horizon = doc.get("horizon")
    elif args.weights == "unit":
        w = WeightValuation.ones(phi, horizon if horizon is not None else sig.t_final)
    else:
        w = None
    if args.per_node:
        print(debug_report(sig, phi, w, horizon), end="")
        return
    if w is None:
        w = WeightValuation.ones(phi, horizon if horizon is not None else sig.t_final)
    if args.soft is not None:
        value = soft_wstl_robustness(sig, phi, w, SoftConfig(beta=args.soft),
                                     args.t, horizon)
    elif args.weights:
        value = wstl_robustness(sig, phi, w, args.t, horizon)
    else:
        value = rho(sig, phi, args.t)
    print(f"{value:.9g}")


def cmd_normalize(args) -> None:
    doc = load_result(args.result)
    phi = parse(doc["formula"])
    normalized = normalize_to_domain(phi, doc["valuation"], doc.get("horizon"))
    out = {
        "format": "wstlpref-result",
        "version": FORMAT_VERSION,
        "formula": doc["formula"],
        "horizon": doc.get("horizon"),
        "solver": doc["solver"],
        "weights": normalized.values,
        "satisfied_pairs": doc["satisfied_pairs"],
        "margin_satisfied_pairs": doc["margin_satisfied_pairs"],
        "mean_margin": doc["mean_margin"],
        "diagnostics": {**doc.get("diagnostics", {}), "renormalized": True},
    }
    with open(args.out, "w") as f:
        json.dump(out, f, indent=1)
        f.write("\n")
    print(f"wrote {args.out}")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_formula_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--formula-text", help="formula in the textual grammar")
    p.add_argument("--formula-file", help="formula JSON file")
    p.add_argument("--horizon", type=int, help="t_final for unbounded windows")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wstlpref", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate scenario trajectories")
    p.add_argument("--scenario", choices=["stop", "pedestrian"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--violating", action="store_true",
                   help="generate rule-violating trajectories (default satisfying)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--x-stop", type=float)
    p.add_argument("--x-cross", type=float)
    p.add_argument("--v-lim", type=float)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pairs", help="build a distance-filtered pair set")
    p.add_argument("--signals", required=True)
    p.add_argument("--n-pairs", type=int, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--channels", default="x,v", help="comma-separated real channels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("elicit", help="serve the elicitation UI/API")
    p.add_argument("--pairs", required=True)
    p.add_argument("--session", required=True, help="session file (created if absent)")
    p.add_argument("--bind", default="127.0.0.1:8765")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--assets", help="directory with built UI assets")
    p.set_defaults(func=cmd_elicit)

    p = sub.add_parser("learn", help="fit a weight valuation from preferences")
    p.add_argument("--method", choices=["rs", "gb"], required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--prefs", help="preference file (from elicitation export)")
    src.add_argument("--session", help="completed session file")
    p.add_argument("--signals", help="override the referenced signals file")
    _add_formula_flags(p)
    p.add_argument("--config", help="LearnConfig JSON file")
    p.add_argument("--out", required=True)
    for name in _CONFIG_FLAGS:
        flag = "--" + name.replace("_", "-")
        kind = LearnConfig.__dataclass_fields__[name].type
        p.add_argument(flag, dest=name,
                       type=int if kind == "int" else float, default=None)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("eval", help="repeated-split accuracy table")
    p.add_argument("--results", nargs="+", required=True,
                   help="learn-result files; each contributes a refit method row")
    p.add_argument("--prefs", required=True)
    p.add_argument("--signals")
    p.add_argument("--splits-seed", type=int, default=0)
    p.add_argument("--n-splits", type=int, default=10)
    p.add_argument("--ratio", type=float, default=0.7)
    p.add_argument("--bt-lr", type=float, default=0.1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("robustness", help="robustness of one stored signal")
    p.add_argument("--signals", required=True)
    p.add_argument("--name", required=True)
    _add_formula_flags(p)
    p.add_argument("--weights", help="learn-result file, or 'unit'")
    p.add_argument("--soft", type=float, help="smoothed value at this beta")
    p.add_argument("--per-node", action="store_true",
                   help="print the per-node robustness trace")
    p.add_argument("--t", type=int, default=0)
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("normalize", help="rescale a result into (0, 1]^n")
    p.add_argument("--result", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_normalize)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SystemExit:
        raise
    except (ValueError, OSError, KeyError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
