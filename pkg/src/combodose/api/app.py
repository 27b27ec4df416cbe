"""HTTP surface of the trial-conduct service."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..designs import DESIGN_CLASSES
from .models import (
    CreateTrialRequest,
    DesignCatalog,
    DesignInfo,
    DESIGN_BLURBS,
    PARAM_MODELS,
    PostCohortRequest,
    PostCohortResponse,
    TrialView,
)
from .sessions import SessionError, SessionStore


def create_app(data_dir: str = "./trial-sessions") -> FastAPI:
    app = FastAPI(title="combodose conduct service", version="0.1.0")
    store = SessionStore(data_dir)
    app.state.store = store

    @app.exception_handler(SessionError)
    async def _session_error(_req: Request, exc: SessionError):
        body = {"code": exc.code, "message": exc.message}
        if exc.detail:
            body["detail"] = exc.detail
        return JSONResponse(status_code=exc.status, content=body)

    @app.get("/api/designs", response_model=DesignCatalog)
    def design_catalog():
        designs = []
        for design_id in sorted(DESIGN_CLASSES):
            cohort_unit = "patient" if design_id == "gcrm" else "cohort"
            designs.append(
                DesignInfo(
                    id=design_id,
                    description=DESIGN_BLURBS[design_id],
                    cohort_unit=cohort_unit,
                    params_schema=PARAM_MODELS[design_id].model_json_schema(),
                )
            )
        return DesignCatalog(designs=designs)

    @app.post("/api/trials", response_model=TrialView, status_code=201)
    def create_trial(request: CreateTrialRequest):
        if request.design not in DESIGN_CLASSES:
            raise SessionError(
                422,
                "unknown-design",
                f"unknown design '{request.design}'",
                detail="valid ids: " + ", ".join(sorted(DESIGN_CLASSES)),
            )
        session = store.create(request)
        return session.view()

    @app.get("/api/trials", response_model=list[str])
    def list_trials():
        return store.list_ids()

    @app.get("/api/trials/{trial_id}", response_model=TrialView)
    def get_trial(trial_id: str):
        return store.get(trial_id).view()

    @app.get("/api/trials/{trial_id}/history")
    def export_history(trial_id: str):
        return store.get(trial_id).export_history()

    @app.post("/api/trials/{trial_id}/cohorts", response_model=PostCohortResponse)
    def post_cohort(trial_id: str, body: PostCohortRequest):
        return store.get(trial_id).post_cohort(body)

    @app.post("/api/trials/{trial_id}/undo", response_model=TrialView)
    def undo_last(trial_id: str):
        return store.get(trial_id).undo_last()

    return app
