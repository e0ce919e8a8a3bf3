"""Queryable local record store.

The engine only ever talks to the :class:`Datastore` interface; the
file-backed implementation below keeps everything testable offline. An
adapter for an external search store is declared but intentionally
unimplemented.

Layout: ``<root>/<source>/<yyyy-mm-dd>.log`` (one canonical JSON record
per line) plus ``<root>/index`` (JSON: content hash -> file/offset).
Ingestion dedupes on record content, so re-ingesting a file is a no-op.
"""

from __future__ import annotations

import hashlib
import json
import threading
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Iterable

from ..model import DataSelector, Record, Source, format_instant, parse_instant


class Datastore(ABC):
    """Minimal contract for a record store the engines can query."""

    @abstractmethod
    def ingest(self, source: Source, records: Iterable[Record]) -> int:
        """Store records; returns how many were new (duplicates skipped)."""

    @abstractmethod
    def select(self, selector: DataSelector) -> list[Record]:
        """Records matching any selector tuple, deduplicated, ordered by
        (ip, timestamp)."""

    @abstractmethod
    def observed_fields(self, source: Source) -> list[str]:
        """Sorted field names seen in ingested records of one source."""


def select(store: Datastore, selector: DataSelector) -> list[Record]:
    return store.select(selector)


def _record_key(record: Record) -> str:
    return hashlib.sha1(record.canonical_json().encode("utf-8")).hexdigest()


# Featurizable typed properties of flow records, offered to the UI's
# attribute picker alongside the free-form field names.
FLOW_BUILTIN_FIELDS = ["bytes", "direction", "port"]


class FileDatastore(Datastore):
    """Append-only JSONL files plus a JSON index, under one root directory.

    Single-writer: ingestion is serialized by a lock; selects read a
    snapshot of the index and may run concurrently with each other.
    """

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._index: dict[str, dict[str, dict]] = {}
        self._fields: dict[str, list[str]] = {}
        self._load_index()

    @property
    def _index_path(self) -> Path:
        return self.root / "index"

    def _load_index(self) -> None:
        if self._index_path.exists():
            doc = json.loads(self._index_path.read_text("utf-8"))
            self._index = doc.get("records", {})
            self._fields = doc.get("fields", {})
        for source in Source:
            self._index.setdefault(source.value, {})
            self._fields.setdefault(source.value, [])

    def _write_index(self) -> None:
        tmp = self._index_path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps({"records": self._index, "fields": self._fields}, sort_keys=True),
            "utf-8",
        )
        tmp.replace(self._index_path)

    def ingest(self, source: Source, records: Iterable[Record]) -> int:
        source = Source(source)
        with self._lock:
            index = self._index[source.value]
            fields = set(self._fields[source.value])
            by_day: dict[str, list[tuple[str, Record]]] = {}
            for record in records:
                if record.source is not source:
                    raise ValueError(
                        f"record source {record.source.value} does not match ingest target {source.value}"
                    )
                key = _record_key(record)
                if key in index:
                    continue
                index[key] = {}  # placeholder until offset is known
                by_day.setdefault(record.timestamp.strftime("%Y-%m-%d"), []).append((key, record))
                fields.update(record.fields.keys())

            added = 0
            for day, entries in sorted(by_day.items()):
                path = self.root / source.value / f"{day}.log"
                path.parent.mkdir(parents=True, exist_ok=True)
                with path.open("a", encoding="utf-8") as handle:
                    offset = handle.tell()
                    for key, record in entries:
                        line = record.canonical_json()
                        handle.write(line + "\n")
                        index[key] = {
                            "ip": record.ip,
                            "ts": format_instant(record.timestamp),
                            "file": f"{source.value}/{day}.log",
                            "offset": offset,
                        }
                        offset += len(line.encode("utf-8")) + 1
                        added += 1
            self._fields[source.value] = sorted(fields)
            if added:
                self._write_index()
            else:
                # drop placeholders from the duplicate-only pass
                self._index[source.value] = {k: v for k, v in index.items() if v}
        return added

    def _read_record(self, entry: dict) -> Record:
        path = self.root / entry["file"]
        with path.open("r", encoding="utf-8") as handle:
            handle.seek(entry["offset"])
            line = handle.readline()
        return Record.from_dict(json.loads(line))

    def select(self, selector: DataSelector) -> list[Record]:
        with self._lock:
            entries = dict(self._index[selector.source.value])
        matched: dict[str, dict] = {}
        for key, entry in entries.items():
            if not entry:
                continue
            stamp = parse_instant(entry["ts"])
            for window in selector.tuples:
                if window.matches_ip(entry["ip"]) and window.contains(stamp):
                    matched[key] = entry
                    break
        ordered = sorted(matched.items(), key=lambda kv: (kv[1]["ip"], kv[1]["ts"], kv[0]))
        return [self._read_record(entry) for _, entry in ordered]

    def observed_fields(self, source: Source) -> list[str]:
        source = Source(source)
        with self._lock:
            names = list(self._fields[source.value])
        if source is Source.FLOW:
            names = sorted(set(names) | set(FLOW_BUILTIN_FIELDS))
        return names


class ExternalSearchDatastore(Datastore):
    """Adapter slot for an external search/index store. Declared so the
    service can be pointed at one later; not implemented in this artifact."""

    def __init__(self, url: str) -> None:
        self.url = url

    def ingest(self, source: Source, records: Iterable[Record]) -> int:
        raise NotImplementedError("external search store adapter is not implemented")

    def select(self, selector: DataSelector) -> list[Record]:
        raise NotImplementedError("external search store adapter is not implemented")

    def observed_fields(self, source: Source) -> list[str]:
        raise NotImplementedError("external search store adapter is not implemented")
