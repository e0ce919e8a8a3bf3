"""Persisted asynchronous jobs over operation configs.

A job is an event: submitting the same config twice creates two jobs.
Each job lives under ``<root>/jobs/<id>/`` as three small documents
(config.json, status.json, result.json) so the store is inspectable,
diff-able and trivially backed up. Status moves pending -> running ->
succeeded|failed exactly once; jobs found "running" at startup were
interrupted by a crash and are failed as such.
"""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

from ..clustering import clustering_document, run_clustering
from ..density import fit_density, score_test_set
from ..discriminant import fit_discriminant
from ..ingest.features import derive_attributes, featurize
from ..ingest.store import Datastore
from ..model import (
    OperationConfig,
    Operation,
    Record,
    config_from_dict,
    config_to_dict,
    format_instant,
    parse_instant,
    validate_config,
)

INTERRUPTED_MESSAGE = "interrupted"


class JobStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    SUCCEEDED = "succeeded"
    FAILED = "failed"


TERMINAL = (JobStatus.SUCCEEDED, JobStatus.FAILED)
_ALLOWED = {
    JobStatus.PENDING: {JobStatus.RUNNING, JobStatus.FAILED},
    JobStatus.RUNNING: {JobStatus.SUCCEEDED, JobStatus.FAILED},
    JobStatus.SUCCEEDED: set(),
    JobStatus.FAILED: set(),
}


class JobNotFound(KeyError):
    pass


class InvalidConfig(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class JobRecord:
    job_id: str
    config: OperationConfig
    status: JobStatus
    created_at: datetime
    finished_at: datetime | None = None
    error_message: str | None = None
    result_ref: str | None = None

    def summary(self) -> dict[str, Any]:
        return {
            "job_id": self.job_id,
            "operation": self.config.operation.value,
            "status": self.status.value,
            "created_at": format_instant(self.created_at),
            "finished_at": format_instant(self.finished_at) if self.finished_at else None,
            "error_message": self.error_message,
            "result_ref": self.result_ref,
        }


def _now() -> datetime:
    return datetime.now(timezone.utc)


class JobStore:
    """Directory-backed job persistence with single-writer mutations."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root) / "jobs"
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()

    def _job_dir(self, job_id: str) -> Path:
        return self.root / job_id

    def _write_json(self, path: Path, doc: Any) -> None:
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True, indent=2), "utf-8")
        tmp.replace(path)

    def create(self, config: OperationConfig) -> JobRecord:
        job = JobRecord(
            job_id=str(uuid.uuid4()),
            config=config,
            status=JobStatus.PENDING,
            created_at=_now(),
        )
        with self._lock:
            directory = self._job_dir(job.job_id)
            directory.mkdir(parents=True)
            self._write_json(directory / "config.json", config_to_dict(config))
            self._write_status(job)
        return job

    def _write_status(self, job: JobRecord) -> None:
        self._write_json(
            self._job_dir(job.job_id) / "status.json",
            {
                "job_id": job.job_id,
                "status": job.status.value,
                "created_at": format_instant(job.created_at),
                "finished_at": format_instant(job.finished_at) if job.finished_at else None,
                "error_message": job.error_message,
                "result_ref": job.result_ref,
            },
        )

    def load(self, job_id: str) -> JobRecord:
        directory = self._job_dir(job_id)
        status_path = directory / "status.json"
        if not status_path.exists():
            raise JobNotFound(job_id)
        status = json.loads(status_path.read_text("utf-8"))
        config = config_from_dict(json.loads((directory / "config.json").read_text("utf-8")))
        return JobRecord(
            job_id=status["job_id"],
            config=config,
            status=JobStatus(status["status"]),
            created_at=parse_instant(status["created_at"]),
            finished_at=parse_instant(status["finished_at"]) if status["finished_at"] else None,
            error_message=status.get("error_message"),
            result_ref=status.get("result_ref"),
        )

    def list_jobs(self) -> list[JobRecord]:
        with self._lock:
            ids = [p.name for p in self.root.iterdir() if p.is_dir()]
        jobs = []
        for job_id in ids:
            try:
                jobs.append(self.load(job_id))
            except (JobNotFound, json.JSONDecodeError, KeyError):
                continue
        jobs.sort(key=lambda j: (j.created_at, j.job_id), reverse=True)
        return jobs

    def transition(
        self,
        job_id: str,
        status: JobStatus,
        error_message: str | None = None,
        result_ref: str | None = None,
    ) -> JobRecord:
        with self._lock:
            job = self.load(job_id)
            if status not in _ALLOWED[job.status]:
                raise ValueError(
                    f"illegal status transition {job.status.value} -> {status.value}"
                )
            finished = _now() if status in TERMINAL else None
            if finished is not None and finished < job.created_at:
                finished = job.created_at
            job = replace(
                job,
                status=status,
                finished_at=finished,
                error_message=error_message,
                result_ref=result_ref,
            )
            self._write_status(job)
        return job

    def save_result(self, job_id: str, doc: Mapping[str, Any]) -> str:
        with self._lock:
            self._write_json(self._job_dir(job_id) / "result.json", doc)
        return "result.json"

    def load_result(self, job_id: str) -> dict[str, Any]:
        path = self._job_dir(job_id) / "result.json"
        if not path.exists():
            raise JobNotFound(job_id)
        return json.loads(path.read_text("utf-8"))

    def recover_interrupted(self) -> list[str]:
        """Fail any job stuck in running (we just restarted, nobody is
        actually running it)."""
        recovered = []
        for job in self.list_jobs():
            if job.status is JobStatus.RUNNING:
                self.transition(job.job_id, JobStatus.FAILED, error_message=INTERRUPTED_MESSAGE)
                recovered.append(job.job_id)
        return recovered


# ---------------------------------------------------------------------------
# pipeline

class EmptyDatasetError(ValueError):
    pass


def _select_records(datastore: Datastore, config: OperationConfig, which: str) -> list[Record]:
    dataset = config.dataset_a if which == "dataset_a" else config.dataset_b
    assert dataset is not None
    records = datastore.select(dataset.selector)
    if not records:
        raise EmptyDatasetError(f"empty dataset: {which}")
    return records


def run_operation(datastore: Datastore, config: OperationConfig) -> dict[str, Any]:
    """Execute select -> featurize -> engine for a validated config and
    return the result document."""
    operation = config.operation
    params = config.params
    records_a = _select_records(datastore, config, "dataset_a")
    row_counts: dict[str, int] = {}

    if operation is Operation.CLUSTERING:
        matrix = featurize(records_a, config.dataset_a.features, config.dataset_a.selector)
        row_counts["dataset_a"] = matrix.n_rows
        clustering = run_clustering(
            matrix,
            min_cluster_size=params.min_cluster_size,
            k=params.effective_k(operation),
            regularization=params.regularization,
        )
        report = clustering_document(clustering)
    else:
        assert config.dataset_b is not None
        records_b = _select_records(datastore, config, "dataset_b")
        spec = config.dataset_a.features
        shared = derive_attributes(records_a + records_b, spec)
        matrix_a = featurize(records_a, spec, config.dataset_a.selector, shared)
        matrix_b = featurize(
            records_b, config.dataset_b.features, config.dataset_b.selector, shared
        )
        row_counts["dataset_a"] = matrix_a.n_rows
        row_counts["dataset_b"] = matrix_b.n_rows
        if operation is Operation.DISCRIMINANT:
            report = fit_discriminant(matrix_a, matrix_b, params.regularization).to_dict()
        else:
            model = fit_density(matrix_a, params.effective_k(operation))
            scores = score_test_set(model, matrix_b)
            report = {"scores": [s.to_dict() for s in scores]}

    return {
        "kind": operation.value,
        "config": config_to_dict(config),
        "row_counts": row_counts,
        "report": report,
    }


# ---------------------------------------------------------------------------
# service

class JobService:
    """Submission, bounded-parallelism execution and retrieval of jobs."""

    def __init__(self, datastore: Datastore, root: str | Path, workers: int = 2) -> None:
        self.datastore = datastore
        self.store = JobStore(root)
        self.workers = max(workers, 1)
        self.interrupted = self.store.recover_interrupted()
        self._pool = ThreadPoolExecutor(max_workers=self.workers)

    def submit(self, config: OperationConfig) -> str:
        violations = validate_config(config)
        if violations:
            raise InvalidConfig(violations)
        job = self.store.create(config)
        self._pool.submit(self._run, job.job_id)
        return job.job_id

    def import_config(self, doc: Mapping[str, Any]) -> str:
        return self.submit(config_from_dict(doc))

    def export_config(self, job_id: str) -> dict[str, Any]:
        return config_to_dict(self.store.load(job_id).config)

    def _run(self, job_id: str) -> None:
        try:
            job = self.store.transition(job_id, JobStatus.RUNNING)
        except (ValueError, JobNotFound):
            return
        try:
            result = run_operation(self.datastore, job.config)
            ref = self.store.save_result(job_id, result)
            self.store.transition(job_id, JobStatus.SUCCEEDED, result_ref=ref)
        except Exception as exc:  # noqa: BLE001 - failures become job state
            self.store.transition(job_id, JobStatus.FAILED, error_message=str(exc))

    def get_job(self, job_id: str) -> JobRecord:
        return self.store.load(job_id)

    def list_jobs(self) -> list[JobRecord]:
        return self.store.list_jobs()

    def get_result(self, job_id: str) -> dict[str, Any]:
        """Result envelope: the result document for succeeded jobs, a
        status document for pending/running, the error for failed."""
        job = self.store.load(job_id)
        envelope: dict[str, Any] = {"job_id": job.job_id, "status": job.status.value}
        if job.status is JobStatus.SUCCEEDED:
            envelope["result"] = self.store.load_result(job_id)
        elif job.status is JobStatus.FAILED:
            envelope["error_message"] = job.error_message
        return envelope

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)
