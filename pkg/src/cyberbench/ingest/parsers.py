"""File parsers for the two supported telemetry sources.

Both parsers collect malformed lines into a reject list instead of
aborting: operational logs are dirty and analysts need partial results
plus a reject report.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from ..model import Direction, Record, Source, parse_instant

FLOW_CSV_HEADER = ["timestamp", "ip", "direction", "port", "peer_ip", "bytes", "protocol"]


class FormatError(ValueError):
    """Whole-file format problem (bad or missing header)."""


@dataclass
class LineReject:
    line: int
    reason: str


@dataclass
class ParseResult:
    records: list[Record] = field(default_factory=list)
    rejects: list[LineReject] = field(default_factory=list)


def _decode(content: bytes | str) -> str:
    if isinstance(content, bytes):
        return content.decode("utf-8")
    return content


def parse_flow_csv(content: bytes | str) -> ParseResult:
    """Parse flow CSV (header: timestamp,ip,direction,port,peer_ip,bytes,protocol).

    One Record per data line; lines that fail any field invariant land in
    the reject list with their 1-based line number (the header is line 1).
    """
    text = _decode(content)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(f"missing header; expected columns {','.join(FLOW_CSV_HEADER)}")
    header = [col.strip() for col in header]
    missing = [col for col in FLOW_CSV_HEADER if col not in header]
    if missing:
        raise FormatError(f"missing column(s): {', '.join(missing)}")
    if header != FLOW_CSV_HEADER:
        unknown = [col for col in header if col not in FLOW_CSV_HEADER]
        if unknown:
            raise FormatError(f"unknown column(s): {', '.join(unknown)}")
        raise FormatError(f"columns out of order; expected {','.join(FLOW_CSV_HEADER)}")

    result = ParseResult()
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            if len(row) != len(FLOW_CSV_HEADER):
                raise ValueError(f"expected {len(FLOW_CSV_HEADER)} fields, got {len(row)}")
            stamp, ip, direction, port, peer_ip, nbytes, protocol = (v.strip() for v in row)
            record = Record(
                source=Source.FLOW,
                timestamp=parse_instant(stamp),
                ip=ip,
                direction=Direction(direction),
                port=int(port),
                bytes=int(nbytes),
                fields={"peer_ip": peer_ip, "protocol": protocol},
            )
        except ValueError as exc:
            result.rejects.append(LineReject(line=line_no, reason=str(exc)))
            continue
        result.records.append(record)
    return result


def parse_host_log_jsonl(content: bytes | str) -> ParseResult:
    """Parse host-log JSONL: one object per line with at least "timestamp"
    and "ip"; every other key is preserved verbatim in Record.fields."""
    text = _decode(content)
    result = ParseResult()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            if not isinstance(doc, dict):
                raise ValueError("line is not a JSON object")
            if "timestamp" not in doc:
                raise ValueError("missing timestamp")
            if "ip" not in doc:
                raise ValueError("missing ip")
            fields = {k: v for k, v in doc.items() if k not in ("timestamp", "ip")}
            record = Record(
                source=Source.HOSTLOG,
                timestamp=parse_instant(doc["timestamp"]),
                ip=doc["ip"],
                fields=fields,
            )
        except (ValueError, json.JSONDecodeError) as exc:
            result.rejects.append(LineReject(line=line_no, reason=str(exc)))
            continue
        result.records.append(record)
    return result


def parse_source(source: Source, content: bytes | str) -> ParseResult:
    if Source(source) is Source.FLOW:
        return parse_flow_csv(content)
    return parse_host_log_jsonl(content)
