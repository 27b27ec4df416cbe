"""Regenerate the golden cBOIN transcript consumed by the web-console tests.

Drives a scripted 10-cohort session through the HTTP service, records the
full state payload after every mutation, and pairs each with the offline
recommendation computed from the exported history.  Run from the repo root:

    python3 scripts/gen_golden_fixture.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from combodose.api.app import create_app
from combodose.conduct import decide_from_history

OUTCOMES = [0, 0, 1, 0, 2, 1, 0, 3, 1, 1]  # DLTs per scripted cohort


def build_transcript() -> dict:
    with tempfile.TemporaryDirectory() as tmp:
        client = TestClient(create_app(tmp))
        created = client.post(
            "/api/trials",
            json={
                "design": "cboin",
                "grid": {"J": 5, "K": 3},
                "study": {"phi": 0.3, "max_n": 60, "cohort_size": 3},
                "seed": 2024,
                "name": "golden",
            },
        ).json()
        trial_id = created["trial_id"]
        steps = []
        view = created
        for dlts in OUTCOMES:
            dose = view["recommendation"]["dose"]
            post = {"dose": dose, "patients": 3, "dlts": dlts}
            resp = client.post(f"/api/trials/{trial_id}/cohorts", json=post)
            resp.raise_for_status()
            view = client.get(f"/api/trials/{trial_id}").json()
            history = client.get(f"/api/trials/{trial_id}/history").json()
            offline = decide_from_history(history)
            steps.append({"post": post, "view": view, "offline": offline["decision"]})
        initial = dict(created)
    # session ids are random; pin them for a stable fixture
    initial["trial_id"] = "golden"
    for s in steps:
        s["view"]["trial_id"] = "golden"
    return {"initial": initial, "steps": steps}


def main():
    out = Path(__file__).resolve().parent.parent / "frontend" / "fixtures" / "golden_cboin.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    transcript = build_transcript()
    out.write_text(json.dumps(transcript, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} ({len(transcript['steps'])} steps)")


if __name__ == "__main__":
    sys.exit(main())
