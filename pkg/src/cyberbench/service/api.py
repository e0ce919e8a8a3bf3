"""HTTP/JSON surface consumed by the exploration UI.

Paths (all JSON):
  POST /api/jobs             submit a config document
  GET  /api/jobs             list job summaries, newest first
  GET  /api/jobs/{id}        status document
  GET  /api/jobs/{id}/result result/status/error envelope
  GET  /api/jobs/{id}/config export the config (no record data, ever)
  POST /api/jobs/import      submit an exported config document
  POST /api/ingest/{source}  upload a telemetry file (raw request body)
  GET  /api/schema/{source}  observed field names for the attribute picker
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..ingest.parsers import FormatError, parse_source
from ..ingest.store import FileDatastore
from ..model import Source, config_from_dict, validate_config
from .jobs import InvalidConfig, JobNotFound, JobService


def _bad_request(detail: Any) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": detail})


def _not_found(detail: str) -> JSONResponse:
    return JSONResponse(status_code=404, content={"detail": detail})


def _parse_source(source: str) -> Source | None:
    try:
        return Source(source)
    except ValueError:
        return None


def create_app(
    data_dir: str | Path, workers: int = 2, frontend_dir: str | Path | None = None
) -> FastAPI:
    data_dir = Path(data_dir)
    datastore = FileDatastore(data_dir / "records")
    service = JobService(datastore, data_dir, workers=workers)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        service.shutdown()

    app = FastAPI(title="cyberbench", docs_url=None, redoc_url=None, lifespan=lifespan)
    app.state.service = service
    app.state.datastore = datastore

    @app.post("/api/jobs")
    async def submit_job(request: Request) -> Any:
        try:
            doc = await request.json()
        except Exception:
            return _bad_request("request body must be a JSON config document")
        try:
            config = config_from_dict(doc)
        except ValueError as exc:
            return _bad_request({"violations": [str(exc)]})
        violations = validate_config(config)
        if violations:
            return _bad_request({"violations": violations})
        job_id = service.submit(config)
        return {"job_id": job_id, "status": "pending"}

    @app.get("/api/jobs")
    async def list_jobs() -> Any:
        return {"jobs": [job.summary() for job in service.list_jobs()]}

    @app.get("/api/jobs/{job_id}")
    async def job_status(job_id: str) -> Any:
        try:
            return service.get_job(job_id).summary()
        except JobNotFound:
            return _not_found("job not found")

    @app.get("/api/jobs/{job_id}/result")
    async def job_result(job_id: str) -> Any:
        try:
            return service.get_result(job_id)
        except JobNotFound:
            return _not_found("job not found")

    @app.get("/api/jobs/{job_id}/config")
    async def export_config(job_id: str) -> Any:
        try:
            return service.export_config(job_id)
        except JobNotFound:
            return _not_found("job not found")

    @app.post("/api/jobs/import")
    async def import_config(request: Request) -> Any:
        try:
            doc = await request.json()
        except Exception:
            return _bad_request("request body must be a JSON config document")
        try:
            job_id = service.import_config(doc)
        except InvalidConfig as exc:
            return _bad_request({"violations": exc.violations})
        except ValueError as exc:
            return _bad_request({"violations": [str(exc)]})
        return {"job_id": job_id, "status": "pending"}

    @app.post("/api/ingest/{source}")
    async def ingest(source: str, request: Request) -> Any:
        parsed_source = _parse_source(source)
        if parsed_source is None:
            return _not_found(f"unknown source: {source}")
        content = await request.body()
        try:
            result = parse_source(parsed_source, content)
        except FormatError as exc:
            return _bad_request(str(exc))
        added = datastore.ingest(parsed_source, result.records)
        return {
            "ingested": added,
            "duplicates": len(result.records) - added,
            "rejected": len(result.rejects),
            "rejects": [{"line": r.line, "reason": r.reason} for r in result.rejects],
        }

    @app.get("/api/schema/{source}")
    async def schema(source: str) -> Any:
        parsed_source = _parse_source(source)
        if parsed_source is None:
            return _not_found(f"unknown source: {source}")
        return {"source": parsed_source.value, "fields": datastore.observed_fields(parsed_source)}

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
