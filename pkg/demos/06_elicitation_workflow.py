"""The elicitation workflow, scripted end to end.

The CLI and the browser UI drive the same JSON API this script uses:
write a dataset and pair set, serve a session, answer every pair,
export the preferences, and learn weights from the export.  Each choice
is persisted atomically, so interrupting and restarting the service
resumes where the participant left off.
"""

import json
import tempfile
import urllib.request
from pathlib import Path

from wstlpref import (
    LearnConfig,
    PreferenceDataset,
    StopSignSpec,
    build_pairs,
    generate_dataset,
    random_sampling_solve,
    save_pairs,
    save_signals,
    stop_sign_formula,
)
from wstlpref.service import ElicitationServer


def get(url):
    with urllib.request.urlopen(url) as r:
        return json.load(r)


def post(url, doc):
    req = urllib.request.Request(url, data=json.dumps(doc).encode(),
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as r:
        return json.load(r)


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    spec = StopSignSpec()
    sigs, _ = generate_dataset(spec, 20, True, 3)
    named = {f"s{i:02d}": s for i, s in enumerate(sigs)}
    save_signals(root / "signals.json", named,
                 meta={"scenario": "stop", "markers": {"x_stop": spec.x_stop}})
    pairset = build_pairs(named, 8, 2.0, ["x", "v"], 3)
    save_pairs(root / "pairs.json", pairset, signals_file="signals.json")

    with ElicitationServer(str(root / "pairs.json"), str(root / "session.json"),
                           port=0, seed=1) as server:
        info = get(server.address + "/api/session")
        print(f"session {info['id']}: {info['total']} pairs to answer")

        # Pretend the participant likes gentle stops: prefer the side
        # whose speed decreases more smoothly (smaller max deceleration).
        for i in range(info["total"]):
            pair = get(server.address + f"/api/pairs/{i}")
            def jerk(side):
                v = pair[side]["v"]
                return max(v[j] - v[j + 1] for j in range(len(v) - 1))
            choice = "left" if jerk("left") <= jerk("right") else "right"
            progress = post(server.address + f"/api/pairs/{i}/choice",
                            {"choice": choice})
            print(f"  answered pair {i}: {choice} ({progress['answered']}/{progress['total']})")

        export = get(server.address + "/api/export")

    dataset = PreferenceDataset(
        tuple((p["preferred"], p["non_preferred"]) for p in export["pairs"]), named
    )
    result = random_sampling_solve(dataset, stop_sign_formula(spec),
                                   LearnConfig(n_samples=500, seed=0))
    print(f"\nlearned from the session: {result.satisfied_pairs}/{len(dataset)} "
          f"pairs satisfied, mean margin {result.mean_margin:.3f}")
