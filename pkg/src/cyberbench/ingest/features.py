"""Turn record selections into named attribute vectors.

Four modes:

* value-count — one column per observed (field, value) pair; per-entity
  counts or per-record 0/1 indicators. The vocabulary is capped at
  ``top_n`` by global frequency (ties lexicographic) so one-hot spaces
  stay bounded.
* field-sum — one column per field, sum of its numeric values per scope.
* port-direction-percent — share of the entity's traffic (bytes or flow
  count) on each well-known port (0-1023) per direction; 0/0 is 0; only
  columns that are nonzero somewhere are emitted.
* contact-count — distinct peer IPs per scope.

Featurization is deterministic: the same records and spec always yield a
bit-identical matrix, including column order (rows and columns are
emitted in sorted order, not encounter order).
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

import numpy as np

from ..model import (
    DataSelector,
    DatasetSpec,
    FeatureMatrix,
    FeatureMode,
    FeatureSpec,
    Granularity,
    Record,
    Scalar,
    Source,
    Unit,
    canonical_scalar,
    count_attribute_name,
    format_instant,
)

CONTACT_ATTRIBUTE = "distinct_peer_ips"
WELL_KNOWN_PORTS = range(0, 1024)

_FLOW_ONLY_MODES = (FeatureMode.PORT_DIRECTION_PERCENT, FeatureMode.CONTACT_COUNT)


class UnsupportedModeError(ValueError):
    """Feature mode incompatible with the selected record source."""


def _check_mode_source(spec: FeatureSpec, source: Source) -> None:
    if spec.mode in _FLOW_ONLY_MODES and source is not Source.FLOW:
        raise UnsupportedModeError(
            f"{spec.mode.value} requires flow records, got {source.value}"
        )


def lookup_field(record: Record, name: str) -> Scalar | None:
    """Resolve a field name against a record: payload fields first, then
    the typed flow properties (bytes, direction, port)."""
    if name in record.fields:
        return record.fields[name]
    if record.source is Source.FLOW:
        if name == "bytes":
            return record.bytes
        if name == "direction":
            return record.direction.value
        if name == "port":
            return record.port
    return None


def _sorted_records(records: Iterable[Record]) -> list[Record]:
    return sorted(records, key=lambda r: (r.ip, r.timestamp))


def _group_rows(
    records: list[Record], spec: FeatureSpec, selector: DataSelector
) -> list[tuple[str, list[Record]]]:
    """Row scopes in deterministic order: per-record rows are one record
    each ("ip|timestamp|ordinal"); per-entity rows group records by the
    first selector tuple they match ("ip|window-start")."""
    if spec.granularity is Granularity.PER_RECORD:
        return [
            (f"{r.ip}|{format_instant(r.timestamp)}|{i}", [r])
            for i, r in enumerate(records)
        ]
    groups: dict[str, list[Record]] = {}
    for record in records:
        window = selector.first_match(record)
        if window is None:
            raise ValueError(
                f"record ({record.ip}, {format_instant(record.timestamp)}) "
                "matches no selector tuple"
            )
        entity = f"{record.ip}|{format_instant(window.start)}"
        groups.setdefault(entity, []).append(record)
    return sorted(groups.items())


def _count_observations(record: Record, fields: Sequence[str]) -> list[str]:
    names = []
    for field_name in fields:
        value = lookup_field(record, field_name)
        if value is None:
            continue
        names.append(count_attribute_name(field_name, value))
    return names


def derive_attributes(records: Iterable[Record], spec: FeatureSpec) -> tuple[str, ...]:
    """Attribute names a record population induces under a spec.

    Factored out of :func:`featurize` so two-dataset operations can build
    one shared attribute space from the union of both selections.
    """
    records = list(records)
    if spec.mode is FeatureMode.VALUE_COUNT:
        counts: Counter[str] = Counter()
        for record in records:
            counts.update(_count_observations(record, spec.fields))
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return tuple(sorted(name for name, _ in ranked[: spec.top_n]))
    if spec.mode is FeatureMode.FIELD_SUM:
        seen: list[str] = []
        for field_name in spec.fields:
            if field_name not in seen:
                seen.append(field_name)
        return tuple(f"{name}_sum" for name in seen)
    if spec.mode is FeatureMode.PORT_DIRECTION_PERCENT:
        present: set[tuple[str, int]] = set()
        for record in records:
            weight = record.bytes if spec.unit is Unit.BYTES else 1
            if weight and record.port in WELL_KNOWN_PORTS:
                present.add((record.direction.value, record.port))
        return tuple(f"{d}_port_{p}_pct" for d, p in sorted(present))
    return (CONTACT_ATTRIBUTE,)


def _numeric(value: Scalar | None) -> float | None:
    if isinstance(value, bool) or value is None:
        return None
    if isinstance(value, (int, float)):
        return float(value)
    return None


def featurize(
    records: Iterable[Record],
    spec: FeatureSpec,
    selector: DataSelector,
    attribute_names: Sequence[str] | None = None,
) -> FeatureMatrix:
    """Build the FeatureMatrix for a selection.

    ``attribute_names`` pins the column set (used when two datasets must
    share one attribute space); when omitted the columns are derived from
    these records alone.
    """
    _check_mode_source(spec, selector.source)
    records = _sorted_records(records)
    for record in records:
        if record.source is not selector.source:
            raise ValueError(
                f"record source {record.source.value} does not match selector "
                f"source {selector.source.value}"
            )
    if attribute_names is None:
        attribute_names = derive_attributes(records, spec)
    attribute_names = tuple(attribute_names)
    column = {name: i for i, name in enumerate(attribute_names)}
    rows = _group_rows(records, spec, selector)
    values = np.zeros((len(rows), len(attribute_names)))

    if spec.mode is FeatureMode.VALUE_COUNT:
        indicator = spec.granularity is Granularity.PER_RECORD
        for i, (_, scope) in enumerate(rows):
            for record in scope:
                for name in _count_observations(record, spec.fields):
                    j = column.get(name)
                    if j is None:
                        continue
                    if indicator:
                        values[i, j] = 1.0
                    else:
                        values[i, j] += 1.0
    elif spec.mode is FeatureMode.FIELD_SUM:
        for i, (_, scope) in enumerate(rows):
            for record in scope:
                for field_name in spec.fields:
                    number = _numeric(lookup_field(record, field_name))
                    if number is None:
                        continue
                    j = column.get(f"{field_name}_sum")
                    if j is not None:
                        values[i, j] += number
    elif spec.mode is FeatureMode.PORT_DIRECTION_PERCENT:
        for i, (_, scope) in enumerate(rows):
            total = 0.0
            for record in scope:
                weight = float(record.bytes) if spec.unit is Unit.BYTES else 1.0
                total += weight
                if record.port in WELL_KNOWN_PORTS:
                    j = column.get(f"{record.direction.value}_port_{record.port}_pct")
                    if j is not None:
                        values[i, j] += weight
            if total > 0:
                values[i, :] /= total
            else:
                values[i, :] = 0.0
    else:  # contact-count
        for i, (_, scope) in enumerate(rows):
            peers = {
                canonical_scalar(record.fields["peer_ip"])
                for record in scope
                if "peer_ip" in record.fields
            }
            values[i, column[CONTACT_ATTRIBUTE]] = float(len(peers))

    return FeatureMatrix(
        attribute_names=attribute_names,
        entity_ids=tuple(entity for entity, _ in rows),
        values=values,
        provenance=DatasetSpec(selector=selector, features=spec),
    )
