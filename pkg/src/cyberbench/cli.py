"""Command line entry point for the analysis service."""

from __future__ import annotations

import argparse
import os
from pathlib import Path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyberbench-serve",
        description="Run the telemetry analysis job service.",
    )
    parser.add_argument(
        "--data-dir",
        default="./data",
        help="root directory for records, jobs and results "
        "(the IDEAS_DATA_DIR environment variable overrides this)",
    )
    parser.add_argument("--port", type=int, default=8000, help="HTTP port")
    parser.add_argument(
        "--workers", type=int, default=2, help="max concurrently running jobs"
    )
    parser.add_argument(
        "--frontend",
        default=None,
        help="optional directory of built UI assets to serve at /",
    )
    return parser


def resolve_data_dir(flag_value: str) -> Path:
    return Path(os.environ.get("IDEAS_DATA_DIR") or flag_value)


def main(argv: list[str] | None = None) -> None:
    import uvicorn

    from .service.api import create_app

    args = build_parser().parse_args(argv)
    data_dir = resolve_data_dir(args.data_dir)
    app = create_app(data_dir, workers=args.workers, frontend_dir=args.frontend)
    uvicorn.run(app, host="127.0.0.1", port=args.port)


if __name__ == "__main__":
    main()
