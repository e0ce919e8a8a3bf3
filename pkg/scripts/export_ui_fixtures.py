#!/usr/bin/env python3
"""Capture real API responses for the three operations (plus jobs list and
schema documents) and write them as JSON fixtures for the UI contract
tests.

Usage:
    python scripts/export_ui_fixtures.py --out frontend/test/fixtures
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from fastapi.testclient import TestClient

from cyberbench.model import Operation, OperationConfig, config_to_dict
from cyberbench.service.api import create_app
from fixtures import (
    contact_baseline_fixture,
    port_role_fixture,
    ransomware_fixture,
    records_to_flow_csv,
    records_to_hostlog_jsonl,
)

SEED = 0


def wait(client: TestClient, job_id: str) -> None:
    for _ in range(3000):
        if client.get(f"/api/jobs/{job_id}").json()["status"] in ("succeeded", "failed"):
            return
        time.sleep(0.01)
    raise RuntimeError(f"job {job_id} did not finish")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="frontend/test/fixtures")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    ransom_records, infected, clean = ransomware_fixture(SEED)
    role_records, role_dataset, _, _ = port_role_fixture(SEED)
    apt_records, apt_baseline, apt_test, _, _ = contact_baseline_fixture(SEED)
    configs = {
        "discriminant": OperationConfig(
            operation=Operation.DISCRIMINANT, dataset_a=infected, dataset_b=clean
        ),
        "clustering": OperationConfig(operation=Operation.CLUSTERING, dataset_a=role_dataset),
        "anomaly": OperationConfig(
            operation=Operation.ANOMALY, dataset_a=apt_baseline, dataset_b=apt_test
        ),
    }

    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(tmp, workers=2)
        with TestClient(app) as client:
            client.post(
                "/api/ingest/hostlog",
                content=records_to_hostlog_jsonl(ransom_records).encode(),
            )
            client.post(
                "/api/ingest/flow",
                content=records_to_flow_csv(role_records + apt_records).encode(),
            )
            for name, config in configs.items():
                job_id = client.post("/api/jobs", json=config_to_dict(config)).json()["job_id"]
                wait(client, job_id)
                result = client.get(f"/api/jobs/{job_id}/result").json()
                (out / f"{name}_result.json").write_text(json.dumps(result, indent=2))
                print(f"wrote {name}_result.json ({result['status']})")

            jobs = client.get("/api/jobs").json()
            (out / "jobs_list.json").write_text(json.dumps(jobs, indent=2))
            for source in ("flow", "hostlog"):
                schema = client.get(f"/api/schema/{source}").json()
                (out / f"schema_{source}.json").write_text(json.dumps(schema, indent=2))
            print("wrote jobs_list.json, schema_flow.json, schema_hostlog.json")


if __name__ == "__main__":
    main()
