"""Proxy-log records and URL decomposition."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional

TSV12_COLUMNS = (
    "timestamp",
    "user_id",
    "url",
    "referrer",
    "user_agent",
    "mime_type",
    "http_status",
    "duration_ms",
    "bytes_c2s",
    "bytes_s2c",
    "client_port",
    "server_port",
)

LOG_FORMATS = ("tsv12", "jsonl")


class ParseError(ValueError):
    """A malformed input line; carries the line number and a reason."""

    def __init__(self, reason: str, line_no: Optional[int] = None):
        self.reason = reason
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + reason)


@dataclass(frozen=True)
class ProxyLog:
    """One parsed proxy-log record. Absent optional fields stay None."""

    url: str
    user_id: str
    referrer: Optional[str] = None
    user_agent: Optional[str] = None
    mime_type: Optional[str] = None
    http_status: Optional[int] = None
    duration_ms: Optional[float] = None
    bytes_c2s: Optional[int] = None
    bytes_s2c: Optional[int] = None
    client_port: Optional[int] = None
    server_port: Optional[int] = None
    timestamp: Optional[int] = None

    def __post_init__(self):
        if not self.url:
            raise ParseError("url is empty")
        if not self.user_id:
            raise ParseError("user_id is empty")
        for name in ("client_port", "server_port"):
            port = getattr(self, name)
            if port is not None and not 0 <= port <= 65535:
                raise ParseError(f"{name} out of range: {port}")
        for name in ("duration_ms", "bytes_c2s", "bytes_s2c"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ParseError(f"{name} is negative: {value}")

    def with_url(self, url: str) -> "ProxyLog":
        return replace(self, url=url)


@dataclass(frozen=True)
class UrlParts:
    """The seven logical URL components plus hostname metadata.

    Decomposition is total and raw-preserving: nothing is percent-decoded
    or case-folded, missing components are empty strings, and an optional
    ":port" suffix on the host is stripped and discarded.
    """

    protocol: str
    hostname: str
    second_level_domain: str
    top_level_domain: str
    path: str
    filename: str
    query: str
    fragment: str
    subdomain_count: int
    host_is_ip: bool


def _is_ipv4(host: str) -> bool:
    labels = host.split(".")
    if len(labels) != 4:
        return False
    for label in labels:
        if not label.isdigit() or len(label) > 3:
            return False
        if int(label) > 255:
            return False
    return True


def _split_host_port(authority: str) -> str:
    """Strip an optional ':port' suffix; ports are discarded."""
    if authority.startswith("["):  # IPv6 literal, possibly [..]:port
        end = authority.find("]")
        if end >= 0:
            return authority[: end + 1]
        return authority
    colon = authority.rfind(":")
    if colon >= 0 and authority[colon + 1 :].isdigit() and colon + 1 < len(authority):
        return authority[:colon]
    return authority


def decompose_url(url: str) -> UrlParts:
    """Split a URL into protocol/host/domain/path/filename/query/fragment.

    Grammar: the scheme is everything before "://" (absent separator means
    protocol ""), the host runs to the first '/', '?' or '#', the fragment
    follows the first '#', the query sits between the first '?' and the
    fragment, and the path is whatever remains. Any string decomposes.
    """
    sep = url.find("://")
    if sep >= 0:
        protocol = url[:sep]
        rest = url[sep + 3 :]
    else:
        protocol = ""
        rest = url

    host_end = len(rest)
    for stop in "/?#":
        pos = rest.find(stop)
        if pos >= 0:
            host_end = min(host_end, pos)
    authority = rest[:host_end]
    tail = rest[host_end:]

    hostname = _split_host_port(authority)

    frag_pos = tail.find("#")
    if frag_pos >= 0:
        fragment = tail[frag_pos + 1 :]
        tail = tail[:frag_pos]
    else:
        fragment = ""
    query_pos = tail.find("?")
    if query_pos >= 0:
        query = tail[query_pos + 1 :]
        path = tail[:query_pos]
    else:
        query = ""
        path = tail

    host_is_ip = _is_ipv4(hostname) or hostname.startswith("[")
    if host_is_ip:
        sld = ""
        tld = ""
        subdomains = 0
    else:
        labels = hostname.split(".") if hostname else []
        tld = labels[-1] if labels else ""
        sld = labels[-2] if len(labels) >= 2 else ""
        subdomains = max(0, len(labels) - 2)

    segment = path.rsplit("/", 1)[-1]
    filename = segment if "." in segment else ""

    return UrlParts(
        protocol=protocol,
        hostname=hostname,
        second_level_domain=sld,
        top_level_domain=tld,
        path=path,
        filename=filename,
        query=query,
        fragment=fragment,
        subdomain_count=subdomains,
        host_is_ip=host_is_ip,
    )


def recompose_url(parts: UrlParts) -> str:
    """Inverse of decompose_url up to a stripped port suffix."""
    url = parts.protocol + "://" + parts.hostname + parts.path
    if parts.query:
        url += "?" + parts.query
    if parts.fragment:
        url += "#" + parts.fragment
    return url


def group_domain(url: str) -> str:
    """Case-folded, port-stripped hostname used as the entity 'domain'."""
    return decompose_url(url).hostname.lower()


def _parse_int(raw: str, field: str, line_no: Optional[int]) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"unparseable integer in {field}: {raw!r}", line_no) from None


def _parse_float(raw: str, field: str, line_no: Optional[int]) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"unparseable number in {field}: {raw!r}", line_no) from None


def _build_log(fields: dict, line_no: Optional[int]) -> ProxyLog:
    try:
        return ProxyLog(**fields)
    except ParseError as exc:
        raise ParseError(exc.reason, line_no) from None


def parse_tsv12(line: str, line_no: Optional[int] = None) -> ProxyLog:
    cols = line.rstrip("\r\n").split("\t")
    if len(cols) != len(TSV12_COLUMNS):
        raise ParseError(
            f"expected {len(TSV12_COLUMNS)} tab-separated columns, got {len(cols)}",
            line_no,
        )
    raw = dict(zip(TSV12_COLUMNS, cols))
    fields: dict = {
        "url": raw["url"],
        "user_id": raw["user_id"],
        "referrer": raw["referrer"] or None,
        "user_agent": raw["user_agent"] or None,
        "mime_type": raw["mime_type"] or None,
    }
    for name in ("timestamp", "http_status", "bytes_c2s", "bytes_s2c", "client_port", "server_port"):
        fields[name] = _parse_int(raw[name], name, line_no) if raw[name] else None
    fields["duration_ms"] = (
        _parse_float(raw["duration_ms"], "duration_ms", line_no) if raw["duration_ms"] else None
    )
    return _build_log(fields, line_no)


def parse_jsonl(line: str, line_no: Optional[int] = None) -> ProxyLog:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line_no) from None
    if not isinstance(obj, dict):
        raise ParseError("JSON record is not an object", line_no)
    unknown = set(obj) - set(TSV12_COLUMNS)
    if unknown:
        raise ParseError(f"unknown fields: {sorted(unknown)}", line_no)
    fields = {name: obj.get(name) for name in TSV12_COLUMNS}
    fields = {k: v for k, v in fields.items() if v is not None}
    fields.setdefault("url", "")
    fields.setdefault("user_id", "")
    return _build_log(fields, line_no)


def parse_proxy_log(line: str, format: str, line_no: Optional[int] = None) -> ProxyLog:
    if format == "tsv12":
        return parse_tsv12(line, line_no)
    if format == "jsonl":
        return parse_jsonl(line, line_no)
    raise ValueError(f"unsupported log format: {format!r}")


def format_tsv12(log: ProxyLog) -> str:
    """Render a record as one tsv12 line (None -> empty column)."""

    def col(value) -> str:
        if value is None:
            return ""
        if isinstance(value, float) and value.is_integer():
            return str(int(value))
        return str(value)

    return "\t".join(col(getattr(log, name)) for name in TSV12_COLUMNS)


def read_logs(
    lines: Iterable[str],
    format: str,
    errors: Optional[list] = None,
) -> Iterator[ProxyLog]:
    """Parse a line stream; parse failures are appended to `errors` (or raised)."""
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield parse_proxy_log(line, format, line_no)
        except ParseError as exc:
            if errors is None:
                raise
            errors.append(exc)
