"""Log-structured trial sessions.

Every session is an append-only JSON-lines file of events (created, cohort,
undo); state and recommendations are always recomputed by replay, so a
process restart, an undo, or an export to the offline ``decide`` command all
see exactly the same thing.  Mutations on one session are serialized by a
lock and guarded by an optional revision check.
"""

from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path
from typing import Optional

from ..conduct import (
    TrialSetup,
    build_from_setup,
    log_from_json,
    log_to_json,
    matrix_rows,
    recommend,
    replay,
    setup_from_json,
)
from ..core import CohortRecord, Decision, TrialError
from ..designs.base import decision_rng


class SessionError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


class TrialSession:
    def __init__(self, trial_id: str, path: Path, events: list[dict]):
        if not events or events[0].get("type") != "created":
            raise SessionError(500, "corrupt-session", f"session {trial_id} has no creation event")
        self.trial_id = trial_id
        self.path = path
        self.events = events
        self.lock = threading.Lock()
        created = events[0]
        self.name = created.get("name")
        self.setup = setup_from_json(created)
        self.design = build_from_setup(self.setup)

    # -- event log ----------------------------------------------------------

    def _append(self, event: dict):
        self.events.append(event)
        with self.path.open("a") as fh:
            fh.write(json.dumps(event) + "\n")

    def _current_log(self, upto: Optional[int] = None) -> list[CohortRecord]:
        log: list[dict] = []
        events = self.events if upto is None else self.events[: upto + 1]
        for e in events:
            if e["type"] == "cohort":
                log.append(e)
            elif e["type"] == "undo":
                log.pop()
        return log_from_json(log)

    @property
    def revision(self) -> int:
        return sum(1 for e in self.events if e["type"] in ("cohort", "undo"))

    # -- reads ---------------------------------------------------------------

    def _decision_payload(self, upto: Optional[int] = None) -> tuple[Decision, dict]:
        state = replay(self.design, self._current_log(upto))
        decision = recommend(self.design, state, self.setup.seed, self.setup.study.early_stop_n)
        estimates = None
        if state.total_patients:
            estimates = self.design.estimates(state, decision_rng(self.setup.seed, state))
        payload = {
            "decision": _decision_dict(decision),
            "estimates": matrix_rows(estimates),
            "phase": state.phase,
        }
        return decision, payload

    def view(self) -> dict:
        state = replay(self.design, self._current_log())
        decision = recommend(self.design, state, self.setup.seed, self.setup.study.early_stop_n)
        estimates = None
        if state.total_patients:
            estimates = self.design.estimates(state, decision_rng(self.setup.seed, state))
        study = self.setup.study
        return {
            "trial_id": self.trial_id,
            "name": self.name,
            "design": self.setup.design_id,
            "params": self.setup.params,
            "grid": {"J": self.setup.grid.n_a, "K": self.setup.grid.n_b},
            "study": {
                "phi": study.phi,
                "max_n": study.max_n,
                "cohort_size": study.cohort_size,
                "early_stop_n": study.early_stop_n,
            },
            "seed": self.setup.seed,
            "revision": self.revision,
            "phase": state.phase,
            "patients": state.total_patients,
            "dlts": state.total_dlts,
            "n": [[int(v) for v in state.n[:, k]] for k in range(state.grid.n_b)],
            "y": [[int(v) for v in state.y[:, k]] for k in range(state.grid.n_b)],
            "log": log_to_json(state.log),
            "estimates": matrix_rows(estimates),
            "recommendation": _decision_dict(decision),
            "terminated": decision.is_terminate,
        }

    def export_history(self) -> dict:
        """The offline ``decide`` input format for this session."""
        study = self.setup.study
        return {
            "design": self.setup.design_id,
            "params": self.setup.params,
            "grid": {"J": self.setup.grid.n_a, "K": self.setup.grid.n_b},
            "study": {
                "phi": study.phi,
                "max_n": study.max_n,
                "cohort_size": study.cohort_size,
                "early_stop_n": study.early_stop_n,
            },
            "seed": self.setup.seed,
            "log": log_to_json(self._current_log()),
        }

    # -- mutations ------------------------------------------------------------

    def post_cohort(self, body) -> dict:
        with self.lock:
            if body.idempotency_key:
                for idx in range(len(self.events) - 1, 0, -1):
                    e = self.events[idx]
                    if e["type"] == "cohort" and e.get("idempotency_key") == body.idempotency_key:
                        # replay the response as of the original application
                        _, payload = self._decision_payload(upto=idx)
                        revision_then = sum(
                            1 for ev in self.events[: idx + 1] if ev["type"] in ("cohort", "undo")
                        )
                        return {
                            "trial_id": self.trial_id,
                            "revision": revision_then,
                            "applied": False,
                            **payload,
                        }
            if body.expected_revision is not None and body.expected_revision != self.revision:
                raise SessionError(
                    409,
                    "revision-conflict",
                    f"expected revision {body.expected_revision}, session is at {self.revision}",
                )
            current, _ = self._decision_payload()
            if current.is_terminate:
                raise SessionError(409, "trial-finished", f"trial ended: {current.reason}")
            dose = (body.dose.j, body.dose.k)
            if not self.setup.grid.contains(dose):
                raise SessionError(422, "out-of-grid", f"dose {dose} is outside the grid")
            if dose != current.dose and not body.override:
                raise SessionError(
                    422,
                    "dose-mismatch",
                    f"dose {dose} differs from the recommendation {current.dose}; "
                    "set override=true to record it anyway",
                )
            if dose != current.dose and body.override and not body.note:
                raise SessionError(422, "note-required", "an audit note is required with override")
            event = {
                "type": "cohort",
                "dose": {"j": dose[0], "k": dose[1]},
                "patients": body.patients,
                "dlts": body.dlts,
            }
            if body.idempotency_key:
                event["idempotency_key"] = body.idempotency_key
            if body.override and dose != current.dose:
                event["override"] = True
                event["note"] = body.note
            tentative = self._current_log() + [CohortRecord(dose, body.patients, body.dlts)]
            try:
                replay(self.design, tentative)
            except TrialError as exc:
                raise SessionError(422, "invalid-cohort", str(exc)) from exc
            self._append(event)
            _, payload = self._decision_payload()
            return {
                "trial_id": self.trial_id,
                "revision": self.revision,
                "applied": True,
                **payload,
            }

    def undo_last(self) -> dict:
        with self.lock:
            if not self._current_log():
                raise SessionError(409, "empty-log", "nothing to undo")
            self._append({"type": "undo"})
            return self.view()


def _decision_dict(decision: Decision) -> dict:
    out = {"action": decision.action, "reason": decision.reason}
    if decision.dose is not None:
        out["dose"] = {"j": decision.dose[0], "k": decision.dose[1]}
    else:
        out["dose"] = None
    return out


class SessionStore:
    def __init__(self, data_dir):
        self.dir = Path(data_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, TrialSession] = {}
        self._lock = threading.Lock()

    def create(self, request) -> TrialSession:
        trial_id = uuid.uuid4().hex[:12]
        event = {
            "type": "created",
            "design": request.design,
            "params": request.params,
            "grid": {"J": request.grid.J, "K": request.grid.K},
            "study": request.study.model_dump(),
            "seed": request.seed,
            "name": request.name,
        }
        path = self.dir / f"{trial_id}.jsonl"
        try:
            session = TrialSession(trial_id, path, [event])
        except (TrialError, KeyError, ValueError) as exc:
            raise SessionError(422, "invalid-config", str(exc)) from exc
        with path.open("w") as fh:
            fh.write(json.dumps(event) + "\n")
        with self._lock:
            self._sessions[trial_id] = session
        return session

    def get(self, trial_id: str) -> TrialSession:
        with self._lock:
            if trial_id in self._sessions:
                return self._sessions[trial_id]
        path = self.dir / f"{trial_id}.jsonl"
        if not path.exists():
            raise SessionError(404, "unknown-trial", f"no trial with id '{trial_id}'")
        events = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
        session = TrialSession(trial_id, path, events)
        with self._lock:
            return self._sessions.setdefault(trial_id, session)

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.dir.glob("*.jsonl"))
