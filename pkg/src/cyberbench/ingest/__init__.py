"""Telemetry ingestion: parsing, storage, selection and featurization."""

from .features import (
    CONTACT_ATTRIBUTE,
    UnsupportedModeError,
    derive_attributes,
    featurize,
    lookup_field,
)
from .parsers import (
    FLOW_CSV_HEADER,
    FormatError,
    LineReject,
    ParseResult,
    parse_flow_csv,
    parse_host_log_jsonl,
    parse_source,
)
from .store import Datastore, ExternalSearchDatastore, FileDatastore, select

__all__ = [
    "CONTACT_ATTRIBUTE",
    "Datastore",
    "ExternalSearchDatastore",
    "FLOW_CSV_HEADER",
    "FileDatastore",
    "FormatError",
    "LineReject",
    "ParseResult",
    "UnsupportedModeError",
    "derive_attributes",
    "featurize",
    "lookup_field",
    "parse_flow_csv",
    "parse_host_log_jsonl",
    "parse_source",
    "select",
]
