"""Analyst workbench: configurable discriminant, anomaly and clustering
operations over IP/time-window selections of cyber telemetry, run as
persisted jobs behind an HTTP/JSON API."""

__version__ = "0.1.0"
