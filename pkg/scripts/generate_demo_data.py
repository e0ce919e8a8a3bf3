#!/usr/bin/env python3
"""Generate the three demo datasets, write them as uploadable files plus
ready-to-submit config documents, and optionally run all three operations
locally and print result summaries.

Usage:
    python scripts/generate_demo_data.py --out demo
    python scripts/generate_demo_data.py --out demo --run
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from cyberbench.ingest import FileDatastore
from cyberbench.model import Operation, OperationConfig, Source, config_to_dict
from cyberbench.service.jobs import run_operation
from fixtures import (
    contact_baseline_fixture,
    port_role_fixture,
    ransomware_fixture,
    records_to_flow_csv,
    records_to_hostlog_jsonl,
)


def build(seed: int):
    ransom_records, infected, clean = ransomware_fixture(seed)
    role_records, role_dataset, _, _ = port_role_fixture(seed)
    apt_records, apt_baseline, apt_test, _, _ = contact_baseline_fixture(seed)
    configs = {
        "discriminant": OperationConfig(
            operation=Operation.DISCRIMINANT, dataset_a=infected, dataset_b=clean
        ),
        "clustering": OperationConfig(operation=Operation.CLUSTERING, dataset_a=role_dataset),
        "anomaly": OperationConfig(
            operation=Operation.ANOMALY, dataset_a=apt_baseline, dataset_b=apt_test
        ),
    }
    return ransom_records, role_records + apt_records, configs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--run", action="store_true", help="also execute the three operations locally"
    )
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    hostlog_records, flow_records, configs = build(args.seed)

    (out / "hostlog.jsonl").write_text(records_to_hostlog_jsonl(hostlog_records))
    (out / "flow.csv").write_text(records_to_flow_csv(flow_records))
    for name, config in configs.items():
        (out / f"config_{name}.json").write_text(
            json.dumps(config_to_dict(config), indent=2, sort_keys=True)
        )
    print(f"wrote {len(hostlog_records)} host-log and {len(flow_records)} flow records to {out}/")
    print(f"wrote config documents: {', '.join(sorted(configs))}")

    if not args.run:
        print("upload with: curl --data-binary @demo/flow.csv localhost:8000/api/ingest/flow")
        return

    store = FileDatastore(out / "datastore")
    store.ingest(Source.HOSTLOG, hostlog_records)
    store.ingest(Source.FLOW, flow_records)
    for name, config in configs.items():
        doc = run_operation(store, config)
        report = doc["report"]
        if name == "discriminant":
            top = report["attributes"][:3]
            print(f"{name}: top attributes " + ", ".join(f"{a['attribute']}={a['score']:.2f}" for a in top))
        elif name == "clustering":
            sizes = sorted((c["size"] for c in report["clusters"]), reverse=True)
            print(f"{name}: {len(report['clusters'])} clusters (sizes {sizes}), {len(report['outliers'])} outliers")
        else:
            top = report["scores"][0]
            print(f"{name}: most anomalous {top['entity_id']} score {top['score']:.3f}")


if __name__ == "__main__":
    main()
