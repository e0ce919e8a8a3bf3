"""Job persistence, execution lifecycle and the HTTP API."""

from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from cyberbench.ingest import FileDatastore
from cyberbench.model import (
    DataSelector,
    DatasetSpec,
    FeatureMode,
    FeatureSpec,
    IpWindow,
    Operation,
    OperationConfig,
    OperationParams,
    Source,
    config_to_dict,
)
from cyberbench.service.api import create_app
from cyberbench.service.jobs import (
    INTERRUPTED_MESSAGE,
    InvalidConfig,
    JobNotFound,
    JobService,
    JobStatus,
    JobStore,
)
from fixtures import (
    contact_baseline_fixture,
    hostlog,
    port_role_fixture,
    ransomware_fixture,
    utc,
)

RANSOM_SEED = 0


def make_service(tmp_path, with_data=True) -> JobService:
    datastore = FileDatastore(tmp_path / "records")
    if with_data:
        records, _, _ = ransomware_fixture(RANSOM_SEED)
        datastore.ingest(Source.HOSTLOG, records)
    return JobService(datastore, tmp_path, workers=2)


def ransom_config(operation=Operation.DISCRIMINANT) -> OperationConfig:
    _, infected, clean = ransomware_fixture(RANSOM_SEED)
    dataset_b = clean if operation in (Operation.DISCRIMINANT, Operation.ANOMALY) else None
    return OperationConfig(operation=operation, dataset_a=infected, dataset_b=dataset_b)


def wait_terminal(service: JobService, job_id: str, timeout: float = 30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        job = service.get_job(job_id)
        if job.status in (JobStatus.SUCCEEDED, JobStatus.FAILED):
            return job
        time.sleep(0.02)
    raise AssertionError(f"job {job_id} did not finish in {timeout}s")


class TestJobLifecycle:
    def test_submit_runs_to_success(self, tmp_path):
        service = make_service(tmp_path)
        job_id = service.submit(ransom_config())
        assert service.get_job(job_id).status in (
            JobStatus.PENDING,
            JobStatus.RUNNING,
            JobStatus.SUCCEEDED,
        )
        job = wait_terminal(service, job_id)
        assert job.status is JobStatus.SUCCEEDED
        assert job.result_ref == "result.json"
        assert job.finished_at >= job.created_at
        result = service.get_result(job_id)
        assert result["status"] == "succeeded"
        assert result["result"]["kind"] == "discriminant"
        service.shutdown()

    def test_invalid_config_rejected_without_persisting(self, tmp_path):
        service = make_service(tmp_path, with_data=False)
        config = OperationConfig(
            operation=Operation.CLUSTERING,
            dataset_a=ransom_config().dataset_a,
            dataset_b=ransom_config().dataset_a,
        )
        with pytest.raises(InvalidConfig) as err:
            service.submit(config)
        assert err.value.violations == ["dataset_b must be absent for clustering"]
        assert service.list_jobs() == []
        service.shutdown()

    def test_duplicate_submissions_make_distinct_jobs(self, tmp_path):
        service = make_service(tmp_path)
        first = service.submit(ransom_config())
        second = service.submit(ransom_config())
        assert first != second
        wait_terminal(service, first)
        wait_terminal(service, second)
        service.shutdown()

    def test_empty_selection_fails_with_message(self, tmp_path):
        service = make_service(tmp_path, with_data=False)
        job_id = service.submit(ransom_config())
        job = wait_terminal(service, job_id)
        assert job.status is JobStatus.FAILED
        assert "empty dataset" in job.error_message
        result = service.get_result(job_id)
        assert result["status"] == "failed"
        assert "empty dataset" in result["error_message"]
        service.shutdown()

    def test_list_jobs_newest_first(self, tmp_path):
        service = make_service(tmp_path)
        first = service.submit(ransom_config())
        wait_terminal(service, first)
        second = service.submit(ransom_config())
        wait_terminal(service, second)
        listed = [job.job_id for job in service.list_jobs()]
        assert listed.index(second) < listed.index(first)
        service.shutdown()

    def test_pending_result_is_a_status_document(self, tmp_path):
        service = make_service(tmp_path)
        job = service.store.create(ransom_config())  # persisted but never scheduled
        envelope = service.get_result(job.job_id)
        assert envelope == {"job_id": job.job_id, "status": "pending"}
        service.shutdown()

    def test_unknown_job(self, tmp_path):
        service = make_service(tmp_path, with_data=False)
        with pytest.raises(JobNotFound):
            service.get_result("no-such-job")
        service.shutdown()


class TestStatusMachine:
    def test_terminal_states_frozen(self, tmp_path):
        store = JobStore(tmp_path)
        job = store.create(ransom_config())
        store.transition(job.job_id, JobStatus.RUNNING)
        store.transition(job.job_id, JobStatus.SUCCEEDED, result_ref="result.json")
        with pytest.raises(ValueError, match="transition"):
            store.transition(job.job_id, JobStatus.RUNNING)
        with pytest.raises(ValueError, match="transition"):
            store.transition(job.job_id, JobStatus.FAILED)

    def test_pending_cannot_succeed_directly(self, tmp_path):
        store = JobStore(tmp_path)
        job = store.create(ransom_config())
        with pytest.raises(ValueError, match="transition"):
            store.transition(job.job_id, JobStatus.SUCCEEDED)


class TestRestart:
    def test_jobs_survive_restart(self, tmp_path):
        service = make_service(tmp_path)
        job_id = service.submit(ransom_config())
        wait_terminal(service, job_id)
        service.shutdown()

        reopened = JobService(FileDatastore(tmp_path / "records"), tmp_path, workers=1)
        assert [job.job_id for job in reopened.list_jobs()] == [job_id]
        assert reopened.get_result(job_id)["result"]["kind"] == "discriminant"
        reopened.shutdown()

    def test_running_jobs_recover_as_interrupted(self, tmp_path):
        store = JobStore(tmp_path)
        job = store.create(ransom_config())
        store.transition(job.job_id, JobStatus.RUNNING)

        service = JobService(FileDatastore(tmp_path / "records"), tmp_path, workers=1)
        assert service.interrupted == [job.job_id]
        recovered = service.get_job(job.job_id)
        assert recovered.status is JobStatus.FAILED
        assert recovered.error_message == INTERRUPTED_MESSAGE
        service.shutdown()


class TestExportImport:
    def test_round_trip(self, tmp_path):
        service = make_service(tmp_path)
        job_id = service.submit(ransom_config())
        wait_terminal(service, job_id)
        exported = service.export_config(job_id)
        new_job = service.import_config(exported)
        assert new_job != job_id
        assert service.export_config(new_job) == exported
        wait_terminal(service, new_job)
        service.shutdown()

    def test_export_of_failed_job(self, tmp_path):
        service = make_service(tmp_path, with_data=False)
        job_id = service.submit(ransom_config())
        wait_terminal(service, job_id)
        assert service.export_config(job_id)["operation"] == "discriminant"
        service.shutdown()

    def test_tampered_import_rejected(self, tmp_path):
        service = make_service(tmp_path)
        job_id = service.submit(ransom_config())
        exported = service.export_config(job_id)
        exported["operation"] = "correlate"
        with pytest.raises(ValueError, match="unknown operation"):
            service.import_config(exported)
        wait_terminal(service, job_id)
        service.shutdown()

    def test_export_carries_no_record_data(self, tmp_path):
        service = make_service(tmp_path)
        job_id = service.submit(ransom_config())
        wait_terminal(service, job_id)
        payload = json.dumps(service.export_config(job_id))
        assert "dlhost.exe" not in payload
        assert "report_" not in payload  # background filenames
        assert "BaseFileName=" not in payload  # no derived attributes either
        service.shutdown()


FLOW_CSV = (
    "timestamp,ip,direction,port,peer_ip,bytes,protocol\n"
    "2017-05-01T00:00:00Z,10.0.0.5,in,443,8.8.8.8,1200,tcp\n"
    "2017-05-01T00:01:00Z,10.0.0.5,out,80,8.8.4.4,-3,tcp\n"
)


class TestHttpApi:
    @pytest.fixture()
    def client(self, tmp_path):
        app = create_app(tmp_path, workers=2)
        with TestClient(app) as client:
            yield client

    def _ingest_fixture(self, client):
        records, infected, clean = ransomware_fixture(RANSOM_SEED)
        lines = "\n".join(
            json.dumps(
                {
                    "timestamp": record.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
                    "ip": record.ip,
                    **record.fields,
                }
            )
            for record in records
        )
        response = client.post("/api/ingest/hostlog", content=lines.encode())
        assert response.status_code == 200
        return infected, clean

    def _poll(self, client, job_id, timeout=30.0):
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            status = client.get(f"/api/jobs/{job_id}").json()
            if status["status"] in ("succeeded", "failed"):
                return status
            time.sleep(0.02)
        raise AssertionError("job did not finish")

    def test_ingest_reports_rejects(self, client):
        response = client.post("/api/ingest/flow", content=FLOW_CSV.encode())
        assert response.status_code == 200
        body = response.json()
        assert body["ingested"] == 1
        assert body["rejected"] == 1
        assert body["rejects"][0]["line"] == 3

    def test_ingest_unknown_source(self, client):
        assert client.post("/api/ingest/dns", content=b"x").status_code == 404

    def test_ingest_bad_header(self, client):
        response = client.post("/api/ingest/flow", content=b"nope,nope\n")
        assert response.status_code == 400
        assert "missing column" in response.json()["detail"]

    def test_schema_endpoint(self, client):
        client.post("/api/ingest/flow", content=FLOW_CSV.encode())
        body = client.get("/api/schema/flow").json()
        assert body["fields"] == ["bytes", "direction", "peer_ip", "port", "protocol"]
        assert client.get("/api/schema/dns").status_code == 404

    def test_submit_poll_result_round_trip(self, client):
        infected, clean = self._ingest_fixture(client)
        config = OperationConfig(
            operation=Operation.DISCRIMINANT, dataset_a=infected, dataset_b=clean
        )
        response = client.post("/api/jobs", json=config_to_dict(config))
        assert response.status_code == 200
        job_id = response.json()["job_id"]

        status = self._poll(client, job_id)
        assert status["status"] == "succeeded"

        result = client.get(f"/api/jobs/{job_id}/result").json()
        assert result["result"]["kind"] == "discriminant"
        attributes = result["result"]["report"]["attributes"]
        assert attributes[0]["attribute"] == "BaseFileName=dlhost.exe"

        listed = client.get("/api/jobs").json()["jobs"]
        assert listed[0]["job_id"] == job_id

    def test_submit_invalid_config(self, client):
        infected, clean = self._ingest_fixture(client)
        config = OperationConfig(
            operation=Operation.CLUSTERING, dataset_a=infected, dataset_b=clean
        )
        response = client.post("/api/jobs", json=config_to_dict(config))
        assert response.status_code == 400
        assert response.json()["detail"]["violations"] == [
            "dataset_b must be absent for clustering"
        ]
        assert client.get("/api/jobs").json()["jobs"] == []

    def test_submit_garbage_body(self, client):
        response = client.post("/api/jobs", content=b"{not json")
        assert response.status_code == 400

    def test_export_import_over_http(self, client):
        infected, clean = self._ingest_fixture(client)
        config = OperationConfig(
            operation=Operation.DISCRIMINANT, dataset_a=infected, dataset_b=clean
        )
        job_id = client.post("/api/jobs", json=config_to_dict(config)).json()["job_id"]
        self._poll(client, job_id)

        exported = client.get(f"/api/jobs/{job_id}/config").json()
        assert "dlhost.exe" not in json.dumps(exported)
        imported = client.post("/api/jobs/import", json=exported)
        assert imported.status_code == 200
        assert imported.json()["job_id"] != job_id
        self._poll(client, imported.json()["job_id"])

    def test_import_rejects_unknown_operation(self, client):
        infected, clean = self._ingest_fixture(client)
        config = config_to_dict(
            OperationConfig(
                operation=Operation.DISCRIMINANT, dataset_a=infected, dataset_b=clean
            )
        )
        config["operation"] = "correlate"
        response = client.post("/api/jobs/import", json=config)
        assert response.status_code == 400

    def test_unknown_job_endpoints_404(self, client):
        assert client.get("/api/jobs/zzz").status_code == 404
        assert client.get("/api/jobs/zzz/result").status_code == 404
        assert client.get("/api/jobs/zzz/config").status_code == 404
