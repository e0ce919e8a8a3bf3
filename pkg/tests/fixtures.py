"""Seeded synthetic datasets mirroring the three driving use cases:
ransomware forensics over host logs, port-role clustering over flows, and
per-day contact-count baselining."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np

from cyberbench.model import (
    DataSelector,
    DatasetSpec,
    Direction,
    FeatureMatrix,
    FeatureMode,
    FeatureSpec,
    Granularity,
    IpWindow,
    Record,
    Source,
    Unit,
    format_instant,
)

DAY = timedelta(days=1)


def utc(year: int, month: int, day: int, hour: int = 0) -> datetime:
    return datetime(year, month, day, hour, tzinfo=timezone.utc)


def hostlog(ip: str, stamp: datetime, **fields) -> Record:
    return Record(source=Source.HOSTLOG, timestamp=stamp, ip=ip, fields=fields)


def flow(
    ip: str,
    stamp: datetime,
    direction: str,
    port: int,
    peer_ip: str,
    nbytes: int,
    protocol: str = "tcp",
) -> Record:
    return Record(
        source=Source.FLOW,
        timestamp=stamp,
        ip=ip,
        direction=Direction(direction),
        port=port,
        bytes=nbytes,
        fields={"peer_ip": peer_ip, "protocol": protocol},
    )


def ip_windows(ips: list[str], start: datetime, end: datetime) -> tuple[IpWindow, ...]:
    return tuple(IpWindow(ip_pattern=ip, start=start, end=end) for ip in ips)


# ---------------------------------------------------------------------------
# ransomware forensics fixture

RANSOM_MARKER = "dlhost.exe"
_BACKGROUND_FILES = [f"report_{i:02d}.docx" for i in range(15)] + [
    f"tool_{i:02d}.exe" for i in range(15)
]


def ransomware_fixture(seed: int):
    """5 infected host-log entities (marker filename plus background noise
    drawn from the clean entities' distribution) and 20 clean entities.

    Returns (records, infected dataset, clean dataset).
    """
    rng = np.random.default_rng(seed)
    start, end = utc(2017, 5, 1), utc(2017, 5, 2)
    infected_ips = [f"10.0.1.{i}" for i in range(1, 6)]
    clean_ips = [f"10.0.2.{i}" for i in range(1, 21)]

    records: list[Record] = []

    def background(ip: str) -> None:
        for i in range(40):
            name = _BACKGROUND_FILES[rng.integers(0, len(_BACKGROUND_FILES))]
            records.append(
                hostlog(ip, start + timedelta(minutes=int(i)), BaseFileName=name)
            )

    for ip in clean_ips:
        background(ip)
    for ip in infected_ips:
        background(ip)
        for i in range(int(rng.integers(5, 10))):
            records.append(
                hostlog(
                    ip,
                    start + timedelta(minutes=50 + int(i)),
                    BaseFileName=RANSOM_MARKER,
                )
            )

    spec = FeatureSpec(
        mode=FeatureMode.VALUE_COUNT,
        fields=("BaseFileName",),
        granularity=Granularity.PER_ENTITY,
    )
    infected = DatasetSpec(
        selector=DataSelector(source=Source.HOSTLOG, tuples=ip_windows(infected_ips, start, end)),
        features=spec,
    )
    clean = DatasetSpec(
        selector=DataSelector(source=Source.HOSTLOG, tuples=ip_windows(clean_ips, start, end)),
        features=spec,
    )
    return records, infected, clean


# ---------------------------------------------------------------------------
# port-role fixture

def port_role_fixture(seed: int):
    """30 server entities (>= 80% of bytes inbound on 80/443) and 30 client
    entities (>= 80% outbound to 80/443).

    Returns (records, dataset, server ip set, client ip set).
    """
    rng = np.random.default_rng(seed)
    start, end = utc(2017, 5, 1), utc(2017, 5, 2)
    server_ips = [f"10.1.0.{i}" for i in range(1, 31)]
    client_ips = [f"10.2.0.{i}" for i in range(1, 31)]
    records: list[Record] = []

    def traffic(ip: str, heavy: str, light: str) -> None:
        minute = 0

        def emit(direction: str, port: int, nbytes: int) -> None:
            nonlocal minute
            records.append(
                flow(
                    ip,
                    start + timedelta(minutes=minute),
                    direction,
                    port,
                    f"8.8.8.{rng.integers(1, 254)}",
                    nbytes,
                )
            )
            minute += 1

        heavy_bytes = 0
        for port, count in ((80, 14), (443, 8)):
            for _ in range(count):
                nbytes = int(rng.integers(800, 2000))
                heavy_bytes += nbytes
                emit(heavy, port, nbytes)
        # light-direction and odd-port traffic, capped well under 20%
        budget = int(0.12 * heavy_bytes)
        for port in (80, 443, 22):
            nbytes = max(1, budget // 6)
            emit(light, port, nbytes)
            emit(heavy, 22, max(1, budget // 12))

    for ip in server_ips:
        traffic(ip, heavy="in", light="out")
    for ip in client_ips:
        traffic(ip, heavy="out", light="in")

    dataset = DatasetSpec(
        selector=DataSelector(
            source=Source.FLOW,
            tuples=ip_windows(server_ips + client_ips, start, end),
        ),
        features=FeatureSpec(
            mode=FeatureMode.PORT_DIRECTION_PERCENT,
            unit=Unit.BYTES,
            granularity=Granularity.PER_ENTITY,
        ),
    )
    return records, dataset, set(server_ips), set(client_ips)


# ---------------------------------------------------------------------------
# contact-count baselining fixture

def contact_baseline_fixture(seed: int):
    """30 baseline days of distinct-peer counts ~ N(10, 2) for one host,
    plus one test day with 60 contacts and one with 10.

    Returns (records, baseline dataset, test dataset, spiky entity id,
    quiet entity id).
    """
    rng = np.random.default_rng(seed)
    ip = "10.3.0.1"
    records: list[Record] = []

    def day_of_contacts(day_start: datetime, n_peers: int) -> None:
        for i in range(n_peers):
            records.append(
                flow(
                    ip,
                    day_start + timedelta(minutes=i),
                    "out",
                    443,
                    f"192.168.{1 + i // 250}.{1 + i % 250}",
                    1000,
                )
            )

    baseline_windows = []
    for day in range(30):
        day_start = utc(2017, 6, 1) + day * DAY
        baseline_windows.append(IpWindow(ip_pattern=ip, start=day_start, end=day_start + DAY))
        day_of_contacts(day_start, max(1, round(rng.normal(10.0, 2.0))))

    spiky_start = utc(2017, 7, 1)
    quiet_start = utc(2017, 7, 2)
    day_of_contacts(spiky_start, 60)
    day_of_contacts(quiet_start, 10)

    spec = FeatureSpec(mode=FeatureMode.CONTACT_COUNT, granularity=Granularity.PER_ENTITY)
    baseline = DatasetSpec(
        selector=DataSelector(source=Source.FLOW, tuples=tuple(baseline_windows)),
        features=spec,
    )
    test = DatasetSpec(
        selector=DataSelector(
            source=Source.FLOW,
            tuples=(
                IpWindow(ip_pattern=ip, start=spiky_start, end=spiky_start + DAY),
                IpWindow(ip_pattern=ip, start=quiet_start, end=quiet_start + DAY),
            ),
        ),
        features=spec,
    )
    spiky_id = f"{ip}|{format_instant(spiky_start)}"
    quiet_id = f"{ip}|{format_instant(quiet_start)}"
    return records, baseline, test, spiky_id, quiet_id


# ---------------------------------------------------------------------------
# wire renderings for upload through the API

def records_to_flow_csv(records: list[Record]) -> str:
    lines = ["timestamp,ip,direction,port,peer_ip,bytes,protocol"]
    for r in records:
        lines.append(
            f"{format_instant(r.timestamp)},{r.ip},{r.direction.value},{r.port},"
            f"{r.fields['peer_ip']},{r.bytes},{r.fields['protocol']}"
        )
    return "\n".join(lines) + "\n"


def records_to_hostlog_jsonl(records: list[Record]) -> str:
    import json

    return (
        "\n".join(
            json.dumps(
                {"timestamp": format_instant(r.timestamp), "ip": r.ip, **r.fields}
            )
            for r in records
        )
        + "\n"
    )


# ---------------------------------------------------------------------------
# small numeric helpers

def matrix_1d(values: list[float], prefix: str = "e") -> FeatureMatrix:
    return FeatureMatrix(
        attribute_names=("x",),
        entity_ids=tuple(f"{prefix}{i}" for i in range(len(values))),
        values=np.asarray(values, dtype=float).reshape(-1, 1),
    )


def matrix_2d(rows: list[list[float]], names: tuple[str, ...] = ("x", "y")) -> FeatureMatrix:
    arr = np.asarray(rows, dtype=float)
    return FeatureMatrix(
        attribute_names=names[: arr.shape[1]],
        entity_ids=tuple(f"e{i}" for i in range(arr.shape[0])),
        values=arr,
    )


TWO_BLOBS_1D = [0.0, 0.1, 0.2, 0.3, 0.4, 10.0, 10.1, 10.2, 10.3, 10.4]
