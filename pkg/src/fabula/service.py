"""FastAPI service exposing the processing pipeline to clients.

Submission is asynchronous: POST /stories enqueues a background job and
returns an id immediately; clients poll the status endpoint, then fetch
the processed story, chains, or stats. Stories persist in a StoryStore on
disk, so a restarted server still serves everything processed before.
Each request is stateless; the reader UI keeps all view state client-side.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .pipeline import PipelineConfig, StageError, process_story
from .schemas import (
    ChainResponse,
    ProcessedStoryModel,
    StatusResponse,
    StoryListResponse,
    SubmitStoryRequest,
    SubmitStoryResponse,
)
from .store import StoryNotFoundError, StoryStore


def _error(status_code: int, message: str, stage: Optional[str] = None,
           detail: Optional[str] = None) -> JSONResponse:
    body: dict = {"error": message}
    if stage is not None:
        body["stage"] = stage
    if detail is not None:
        body["detail"] = detail
    return JSONResponse(status_code=status_code, content=body)


class _Jobs:
    """In-memory registry of submitted jobs; terminal results live in the
    store, this only tracks status and failure details."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._status: dict[str, dict] = {}
        self._serial = 0

    def create(self) -> str:
        with self._lock:
            self._serial += 1
            job_id = f"job-{self._serial:06d}"
            self._status[job_id] = {"status": "pending"}
            return job_id

    def finish(self, job_id: str) -> None:
        with self._lock:
            self._status[job_id] = {"status": "done"}

    def fail(self, job_id: str, message: str, stage: Optional[str]) -> None:
        with self._lock:
            self._status[job_id] = {"status": "failed", "error": message, "stage": stage}

    def get(self, job_id: str) -> Optional[dict]:
        with self._lock:
            status = self._status.get(job_id)
            return None if status is None else dict(status)

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._status)


def create_app(
    store_dir: str | Path = "fabula_store",
    workers: int = 2,
    static_dir: Optional[str | Path] = None,
) -> FastAPI:
    """Build the service around a story store.

    ``static_dir``, when given and existing, is mounted at /ui so a built
    reader client can be served by the same process.
    """
    app = FastAPI(title="fabula", version="0.1.0")
    store = StoryStore(store_dir)
    jobs = _Jobs()
    executor = ThreadPoolExecutor(max_workers=workers)

    app.state.store = store
    app.state.jobs = jobs

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    def run_job(job_id: str, text: str, bundle: Optional[dict], config: PipelineConfig) -> None:
        try:
            story = process_story(text, bundle, config)
            store.store(story, record_id=job_id)
            jobs.finish(job_id)
        except StageError as exc:
            jobs.fail(job_id, str(exc.cause), exc.stage)
        except Exception as exc:
            jobs.fail(job_id, str(exc), None)

    @app.post("/stories", response_model=SubmitStoryResponse, status_code=202)
    def submit_story(request: SubmitStoryRequest):
        try:
            config = (
                PipelineConfig.from_jsonable(request.config.model_dump())
                if request.config is not None
                else PipelineConfig()
            )
        except ValueError as exc:
            return _error(422, "invalid pipeline configuration", detail=str(exc))
        job_id = jobs.create()
        executor.submit(run_job, job_id, request.text, request.bundle, config)
        return SubmitStoryResponse(id=job_id, status="pending")

    @app.get("/stories", response_model=StoryListResponse)
    def list_stories():
        return StoryListResponse(ids=sorted(set(store.ids()) | set(jobs.ids())))

    @app.get("/stories/{story_id}/status", response_model=StatusResponse)
    def story_status(story_id: str):
        if story_id in store:
            return StatusResponse(id=story_id, status="done")
        status = jobs.get(story_id)
        if status is None:
            return _error(404, f"unknown story id {story_id!r}")
        return StatusResponse(
            id=story_id,
            status=status["status"],
            error=status.get("error"),
            stage=status.get("stage"),
        )

    def _load_or_error(story_id: str):
        try:
            return store.load(story_id), None
        except StoryNotFoundError:
            status = jobs.get(story_id)
            if status is None:
                return None, _error(404, f"unknown story id {story_id!r}")
            if status["status"] == "pending":
                return None, JSONResponse(
                    status_code=202, content={"id": story_id, "status": "pending"}
                )
            return None, _error(
                500, "story processing failed",
                stage=status.get("stage"), detail=status.get("error"),
            )

    @app.get("/stories/{story_id}", response_model=ProcessedStoryModel)
    def get_story(story_id: str):
        story, err = _load_or_error(story_id)
        if err is not None:
            return err
        return ProcessedStoryModel.model_validate(story.to_jsonable())

    @app.get("/stories/{story_id}/chains", response_model=ChainResponse)
    def get_chain(story_id: str, filter: str = "all"):
        story, err = _load_or_error(story_id)
        if err is not None:
            return err
        try:
            chain = story.chain(filter)
        except ValueError as exc:
            return _error(422, "invalid chain filter", detail=str(exc))
        return ChainResponse(id=story_id, filter=filter, event_ids=list(chain.event_ids))

    @app.get("/stories/{story_id}/stats")
    def get_stats(story_id: str):
        story, err = _load_or_error(story_id)
        if err is not None:
            return err
        return story.to_jsonable()["stats"]

    return app
