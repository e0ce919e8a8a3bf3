"""Shared domain model: telemetry records, dataset selectors, feature
specifications and operation configurations.

Everything in this module is an immutable value object; instances are safe
to share across threads. Construction validates type-level invariants and
raises ``ValueError``; cross-field configuration rules are checked by
:func:`validate_config`, which reports violations as data instead of
raising.
"""

from __future__ import annotations

import ipaddress
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from functools import lru_cache
from typing import Any, Mapping

import numpy as np


# telemetry repeats the same addresses millions of times; parsing dominates
# selection without a cache
@lru_cache(maxsize=65536)
def _as_address(text: str) -> ipaddress.IPv4Address | ipaddress.IPv6Address:
    return ipaddress.ip_address(text)


@lru_cache(maxsize=4096)
def _as_network(text: str) -> ipaddress.IPv4Network | ipaddress.IPv6Network:
    return ipaddress.ip_network(text, strict=False)

Scalar = bool | int | float | str


class Source(str, Enum):
    FLOW = "flow"
    HOSTLOG = "hostlog"


class Direction(str, Enum):
    IN = "in"
    OUT = "out"
    NONE = "none"


class FeatureMode(str, Enum):
    VALUE_COUNT = "value-count"
    FIELD_SUM = "field-sum"
    PORT_DIRECTION_PERCENT = "port-direction-percent"
    CONTACT_COUNT = "contact-count"


class Unit(str, Enum):
    BYTES = "bytes"
    FLOWS = "flows"


class Granularity(str, Enum):
    PER_RECORD = "per-record"
    PER_ENTITY = "per-entity"


class Operation(str, Enum):
    DISCRIMINANT = "discriminant"
    ANOMALY = "anomaly"
    CLUSTERING = "clustering"


# ---------------------------------------------------------------------------
# timestamps

def parse_instant(value: str) -> datetime:
    """Parse an ISO-8601 instant into a UTC datetime (millisecond precision)."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError:
        raise ValueError(f"invalid ISO-8601 timestamp: {value!r}") from None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    stamp = stamp.astimezone(timezone.utc)
    return stamp.replace(microsecond=(stamp.microsecond // 1000) * 1000)


def format_instant(stamp: datetime) -> str:
    """Canonical rendering of a UTC instant: ``...T..Z``, milliseconds only
    when nonzero, so that parse/format round-trips are stable."""
    stamp = stamp.astimezone(timezone.utc)
    base = stamp.strftime("%Y-%m-%dT%H:%M:%S")
    if stamp.microsecond:
        base += f".{stamp.microsecond // 1000:03d}"
    return base + "Z"


def _coerce_instant(value: datetime | str) -> datetime:
    if isinstance(value, datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        value = value.astimezone(timezone.utc)
        return value.replace(microsecond=(value.microsecond // 1000) * 1000)
    return parse_instant(value)


# ---------------------------------------------------------------------------
# attribute naming

def canonical_scalar(value: Scalar) -> str:
    """Render a record field value the way attribute names display it.

    Numeric values that compare equal must render identically (1 and 1.0
    would otherwise make column naming depend on which record was seen
    first), so integral floats collapse to their integer form.
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def count_attribute_name(field_name: str, value: Scalar) -> str:
    """Build the ``field=value`` attribute name for a value-count column.

    The field part escapes ``\\`` and ``=`` so distinct (field, value)
    pairs can never collide into one name.
    """
    escaped = field_name.replace("\\", "\\\\").replace("=", "\\=")
    return f"{escaped}={canonical_scalar(value)}"


def split_count_attribute(name: str) -> tuple[str, str] | None:
    """Invert :func:`count_attribute_name`; None for non-count attributes."""
    out: list[str] = []
    i = 0
    while i < len(name):
        ch = name[i]
        if ch == "\\" and i + 1 < len(name):
            out.append(name[i + 1])
            i += 2
            continue
        if ch == "=":
            return "".join(out), name[i + 1:]
        out.append(ch)
        i += 1
    return None


# ---------------------------------------------------------------------------
# records

@dataclass(frozen=True)
class Record:
    """One telemetry event (network flow or host-log entry), indexed by
    IP address and timestamp.

    Flow records must carry a direction, a non-negative byte count and the
    well-known-side port; host-log records keep their remaining payload in
    ``fields``.
    """

    source: Source
    timestamp: datetime
    ip: str
    fields: Mapping[str, Scalar] = field(default_factory=dict)
    direction: Direction = Direction.NONE
    bytes: int | None = None
    port: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", Source(self.source))
        object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "timestamp", _coerce_instant(self.timestamp))
        try:
            _as_address(self.ip)
        except ValueError:
            raise ValueError(f"invalid IP address: {self.ip!r}") from None
        for key, value in self.fields.items():
            if not isinstance(value, (bool, int, float, str)):
                raise ValueError(f"field {key!r} has non-scalar value {value!r}")
        if self.source is Source.FLOW:
            if self.direction is Direction.NONE:
                raise ValueError("flow records require direction 'in' or 'out'")
            if self.bytes is None or self.bytes < 0:
                raise ValueError("flow records require bytes >= 0")
            if self.port is None or not 0 <= self.port <= 65535:
                raise ValueError("flow records require 0 <= port <= 65535")
        else:
            if self.direction is not Direction.NONE:
                raise ValueError("host-log records cannot carry a direction")

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "source": self.source.value,
            "timestamp": format_instant(self.timestamp),
            "ip": self.ip,
            "fields": dict(sorted(self.fields.items())),
        }
        if self.source is Source.FLOW:
            doc["direction"] = self.direction.value
            doc["bytes"] = self.bytes
            doc["port"] = self.port
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Record":
        return cls(
            source=Source(doc["source"]),
            timestamp=parse_instant(doc["timestamp"]),
            ip=doc["ip"],
            fields=dict(doc.get("fields", {})),
            direction=Direction(doc.get("direction", Direction.NONE)),
            bytes=doc.get("bytes"),
            port=doc.get("port"),
        )

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# selectors

@dataclass(frozen=True)
class IpWindow:
    """One (ip-pattern, half-open time window) selection tuple."""

    ip_pattern: str
    start: datetime
    end: datetime

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", _coerce_instant(self.start))
        object.__setattr__(self, "end", _coerce_instant(self.end))
        if "/" in self.ip_pattern:
            try:
                _as_network(self.ip_pattern)
            except ValueError:
                raise ValueError(f"invalid CIDR pattern: {self.ip_pattern!r}") from None
        else:
            try:
                _as_address(self.ip_pattern)
            except ValueError:
                raise ValueError(f"invalid IP pattern: {self.ip_pattern!r}") from None
        if not self.start < self.end:
            raise ValueError("window start must precede end")

    def matches_ip(self, ip: str) -> bool:
        addr = _as_address(ip)
        if "/" in self.ip_pattern:
            net = _as_network(self.ip_pattern)
            return addr.version == net.version and addr in net
        return addr == _as_address(self.ip_pattern)

    def contains(self, stamp: datetime) -> bool:
        return self.start <= stamp < self.end

    def matches(self, record: Record) -> bool:
        return self.matches_ip(record.ip) and self.contains(record.timestamp)


@dataclass(frozen=True)
class DataSelector:
    """Selects records of one source by [IP, time-window] tuples."""

    source: Source
    tuples: tuple[IpWindow, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", Source(self.source))
        object.__setattr__(self, "tuples", tuple(self.tuples))
        if not self.tuples:
            raise ValueError("selector requires at least one [IP, window] tuple")

    def first_match(self, record: Record) -> IpWindow | None:
        for window in self.tuples:
            if window.matches(record):
                return window
        return None


# ---------------------------------------------------------------------------
# feature specification

@dataclass(frozen=True)
class FeatureSpec:
    """How to turn selected records into a numeric attribute vector."""

    mode: FeatureMode
    fields: tuple[str, ...] = ()
    unit: Unit | None = None
    granularity: Granularity = Granularity.PER_ENTITY
    top_n: int = 2048

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", FeatureMode(self.mode))
        object.__setattr__(self, "granularity", Granularity(self.granularity))
        object.__setattr__(self, "fields", tuple(self.fields))
        if self.unit is not None:
            object.__setattr__(self, "unit", Unit(self.unit))
        if self.mode in (FeatureMode.VALUE_COUNT, FeatureMode.FIELD_SUM):
            if not self.fields:
                raise ValueError(f"{self.mode.value} requires at least one field")
            if self.unit is not None:
                raise ValueError("unit only applies to port-direction-percent")
        elif self.mode is FeatureMode.PORT_DIRECTION_PERCENT:
            if self.unit is None:
                raise ValueError("port-direction-percent requires a unit")
            if self.fields:
                raise ValueError("port-direction-percent takes no fields")
        else:  # contact-count
            if self.fields or self.unit is not None:
                raise ValueError("contact-count takes no fields or unit")
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")


@dataclass(frozen=True)
class DatasetSpec:
    """A selector plus the feature spec applied to what it selects."""

    selector: DataSelector
    features: FeatureSpec


# ---------------------------------------------------------------------------
# operation configuration

@dataclass(frozen=True)
class OperationParams:
    """Tunables shared by the three operations.

    ``k`` is the neighbor count; None means "unset", which resolves to 5
    for anomaly scoring and to ``min_cluster_size`` for clustering.
    """

    k: int | None = None
    min_cluster_size: int = 5
    regularization: float = 1e-6

    def effective_k(self, operation: Operation) -> int:
        if self.k is not None:
            return self.k
        if operation is Operation.CLUSTERING:
            return self.min_cluster_size
        return 5


@dataclass(frozen=True)
class OperationConfig:
    """A complete, shareable description of one analytic run."""

    operation: Operation
    dataset_a: DatasetSpec
    dataset_b: DatasetSpec | None = None
    params: OperationParams = field(default_factory=OperationParams)

    def __post_init__(self) -> None:
        object.__setattr__(self, "operation", Operation(self.operation))


def validate_config(config: OperationConfig) -> list[str]:
    """Check every cross-field invariant of an OperationConfig.

    Returns one message per violation; an empty list means the config is
    valid. Pure and deterministic — violations are data, not errors.
    """
    violations: list[str] = []
    two_set = config.operation in (Operation.DISCRIMINANT, Operation.ANOMALY)
    if two_set and config.dataset_b is None:
        violations.append(f"dataset_b is required for {config.operation.value}")
    if config.operation is Operation.CLUSTERING and config.dataset_b is not None:
        violations.append("dataset_b must be absent for clustering")
    if config.dataset_b is not None and config.dataset_a.features != config.dataset_b.features:
        violations.append("dataset_a and dataset_b must use identical feature specifications")
    params = config.params
    if params.k is not None and params.k < 1:
        violations.append("k must be ≥ 1")
    if params.min_cluster_size < 2:
        violations.append("min_cluster_size must be ≥ 2")
    if not params.regularization > 0:
        violations.append("regularization must be > 0")
    return violations


# ---------------------------------------------------------------------------
# canonical config documents

def _selector_to_dict(selector: DataSelector) -> dict[str, Any]:
    return {
        "source": selector.source.value,
        "tuples": [
            {
                "ip_pattern": w.ip_pattern,
                "window": {"start": format_instant(w.start), "end": format_instant(w.end)},
            }
            for w in selector.tuples
        ],
    }


def _selector_from_dict(doc: Mapping[str, Any]) -> DataSelector:
    tuples = tuple(
        IpWindow(
            ip_pattern=entry["ip_pattern"],
            start=parse_instant(entry["window"]["start"]),
            end=parse_instant(entry["window"]["end"]),
        )
        for entry in doc["tuples"]
    )
    return DataSelector(source=Source(doc["source"]), tuples=tuples)


def _features_to_dict(spec: FeatureSpec) -> dict[str, Any]:
    return {
        "mode": spec.mode.value,
        "fields": list(spec.fields),
        "unit": spec.unit.value if spec.unit is not None else None,
        "granularity": spec.granularity.value,
        "top_n": spec.top_n,
    }


def _features_from_dict(doc: Mapping[str, Any]) -> FeatureSpec:
    return FeatureSpec(
        mode=FeatureMode(doc["mode"]),
        fields=tuple(doc.get("fields") or ()),
        unit=Unit(doc["unit"]) if doc.get("unit") is not None else None,
        granularity=Granularity(doc.get("granularity", Granularity.PER_ENTITY)),
        top_n=int(doc.get("top_n", 2048)),
    )


def _dataset_to_dict(dataset: DatasetSpec) -> dict[str, Any]:
    return {
        "selector": _selector_to_dict(dataset.selector),
        "features": _features_to_dict(dataset.features),
    }


def _dataset_from_dict(doc: Mapping[str, Any]) -> DatasetSpec:
    return DatasetSpec(
        selector=_selector_from_dict(doc["selector"]),
        features=_features_from_dict(doc["features"]),
    )


def config_to_dict(config: OperationConfig) -> dict[str, Any]:
    """Canonical config document: selectors, feature specs and params only —
    never any record data, so documents can be shared freely."""
    return {
        "operation": config.operation.value,
        "dataset_a": _dataset_to_dict(config.dataset_a),
        "dataset_b": _dataset_to_dict(config.dataset_b) if config.dataset_b else None,
        "params": {
            "k": config.params.k,
            "min_cluster_size": config.params.min_cluster_size,
            "regularization": config.params.regularization,
        },
    }


def config_from_dict(doc: Mapping[str, Any]) -> OperationConfig:
    """Parse a canonical config document; raises ValueError when malformed."""
    if not isinstance(doc, Mapping):
        raise ValueError("config document must be a JSON object")
    try:
        operation = Operation(doc["operation"])
    except (KeyError, ValueError):
        raise ValueError(f"unknown operation: {doc.get('operation')!r}") from None
    try:
        dataset_a = _dataset_from_dict(doc["dataset_a"])
        dataset_b = _dataset_from_dict(doc["dataset_b"]) if doc.get("dataset_b") else None
        params_doc = doc.get("params") or {}
        params = OperationParams(
            k=int(params_doc["k"]) if params_doc.get("k") is not None else None,
            min_cluster_size=int(params_doc.get("min_cluster_size", 5)),
            regularization=float(params_doc.get("regularization", 1e-6)),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed config document: {exc}") from None
    return OperationConfig(
        operation=operation, dataset_a=dataset_a, dataset_b=dataset_b, params=params
    )


def config_to_json(config: OperationConfig) -> str:
    return json.dumps(config_to_dict(config), sort_keys=True, indent=2)


def config_from_json(text: str | bytes) -> OperationConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config document is not valid JSON: {exc}") from None
    return config_from_dict(doc)


# ---------------------------------------------------------------------------
# feature matrix

@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Dense numeric view of a record selection.

    Rows are entities (or individual records), columns are named
    attributes. Values are finite float64; the array is frozen after
    construction.
    """

    attribute_names: tuple[str, ...]
    entity_ids: tuple[str, ...]
    values: np.ndarray
    provenance: DatasetSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))
        object.__setattr__(self, "entity_ids", tuple(self.entity_ids))
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            values = values.reshape(len(self.entity_ids), len(self.attribute_names))
        if values.shape != (len(self.entity_ids), len(self.attribute_names)):
            raise ValueError(
                f"matrix shape {values.shape} does not match "
                f"{len(self.entity_ids)} rows x {len(self.attribute_names)} attributes"
            )
        if values.size and not np.all(np.isfinite(values)):
            raise ValueError("feature matrix values must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return len(self.entity_ids)

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_names)

    def column_index(self, name: str) -> int:
        return self.attribute_names.index(name)

    def row_by_entity(self, entity_id: str) -> np.ndarray:
        return self.values[self.entity_ids.index(entity_id)]
