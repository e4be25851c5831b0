"""Deterministic synthetic proxy-log corpora for tests and benchmarks.

Scenarios: dictionary-word benign traffic, character-random (DGA-style)
domains, encrypted-path flows, and a mixed corpus with exact class counts.
Every flow is labeled through the emitted malicious-domain list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._words import WORDS
from .logmodel import ProxyLog

SCENARIOS = ("dga", "enc", "benign", "mixed")

_BENIGN_TLDS = ("com", "net", "org", "io", "co")
_DGA_TLDS = ("com", "net", "ru", "in", "eu", "nl", "biz")
_DGA_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789"
_B64_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/"
_HEX_ALPHABET = "0123456789abcdef"

_BROWSER_UAS = (
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/119.0 Safari/537.36",
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) AppleWebKit/605.1.15 (KHTML, like Gecko) Version/16.5 Safari/605.1.15",
    "Mozilla/5.0 (X11; Linux x86_64; rv:109.0) Gecko/20100101 Firefox/117.0",
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64; rv:109.0) Gecko/20100101 Firefox/115.0",
)
_SHORT_UAS = ("Mozilla/4.0", "core/1.0", "win32", "Java/1.8.0_151")
_MIMES = ("text/html", "image/png", "image/jpeg", "text/css", "application/javascript")
_EXTS = (".html", ".php", ".jpg", ".png", ".css", ".js")

_BASE_TS = 1_700_000_000_000


@dataclass
class SynthCorpus:
    flows: list  # ProxyLog, timestamp order
    labels: list  # 1 = malicious flow, aligned with flows
    kinds: list  # "benign" | "dga" | "enc", aligned with flows
    malicious_domains: list  # hostnames backing the label store
    dictionary: list  # benign SLD dictionary (the Alexa stand-in)
    scenario: str
    class_counts: dict


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & ((1 << 64) - 1), stream]))


def _word(rng) -> str:
    return WORDS[int(rng.integers(0, len(WORDS)))]


def _chars(rng, alphabet: str, n: int) -> str:
    idx = rng.integers(0, len(alphabet), size=n)
    return "".join(alphabet[int(i)] for i in idx)


def _benign_sld(rng) -> str:
    style = int(rng.integers(0, 3))
    if style == 0:
        return _word(rng) + _word(rng)
    if style == 1:
        return _word(rng) + "-" + _word(rng)
    return _word(rng)


def benign_dictionary(seed: int, size: int = 600) -> list:
    """Benign SLD list standing in for a popular-domains feed."""
    rng = _rng(seed, 11)
    entries = list(dict.fromkeys(_benign_sld(rng) for _ in range(size * 2)))
    return entries[:size]


def _benign_path(rng) -> str:
    segs = int(rng.integers(1, 4))
    parts = []
    for _ in range(segs):
        if rng.random() < 0.3:
            parts.append(_word(rng) + "-" + _word(rng))
        else:
            parts.append(_word(rng))
    path = "/" + "/".join(parts)
    if rng.random() < 0.7:
        path += "/" + _word(rng) + _EXTS[int(rng.integers(0, len(_EXTS)))]
    return path


def _benign_query(rng) -> str:
    if rng.random() < 0.35:
        return ""
    n = int(rng.integers(1, 4))
    pairs = []
    for _ in range(n):
        key = _word(rng)[:4]
        if rng.random() < 0.5:
            pairs.append(f"{key}={int(rng.integers(1, 9999))}")
        else:
            pairs.append(f"{key}={_word(rng)}")
    return "&".join(pairs)


@dataclass
class _Flow:
    url: str
    referrer: Optional[str]
    user_agent: Optional[str]
    mime_type: Optional[str]
    http_status: Optional[int]
    duration_ms: Optional[float]
    bytes_c2s: Optional[int]
    bytes_s2c: Optional[int]
    server_port: int
    domain: str
    malicious: bool


_CONSONANTS = "bcdfghjklmnpqrstvwxz"


def _lookalike_sld(rng) -> str:
    """Legitimate but generated-looking SLD: initialisms, vowel-less brand
    names, or the random hostnames of browser connectivity probes."""
    style = rng.random()
    if style < 0.5:
        return _chars(rng, _DGA_ALPHABET, int(rng.integers(8, 14)))
    base = _chars(rng, _CONSONANTS, int(rng.integers(6, 12)))
    if rng.random() < 0.3:
        base += _chars(rng, "0123456789", int(rng.integers(1, 4)))
    return base


def _encoded_url_tail(rng) -> str:
    """Base64-looking path (plus optional hex query) shared verbatim by C&C
    payloads and legitimate encoded assets; only non-URL fields and the
    domain distinguish the two."""
    blob = _chars(rng, _B64_ALPHABET, int(rng.integers(40, 100)))
    prefix = f"/{_word(rng)}" if rng.random() < 0.4 else ""
    tail = f"{prefix}/{blob}"
    if rng.random() < 0.4:
        tail += "=" * int(rng.integers(1, 3))
    if rng.random() < 0.35:
        tail += "?" + _chars(rng, _HEX_ALPHABET, int(rng.integers(24, 64)))
    return tail


def _benign_flow(rng, dictionary: list) -> _Flow:
    style = rng.random()
    if style < 0.20:
        sld = _lookalike_sld(rng)
    else:
        sld = dictionary[int(rng.integers(0, len(dictionary)))]
    tld = _BENIGN_TLDS[int(rng.integers(0, len(_BENIGN_TLDS)))]
    www = "www." if rng.random() < 0.6 else ""
    host = f"{www}{sld}.{tld}"
    https = rng.random() < 0.4
    scheme = "https" if https else "http"
    if style >= 0.85:
        # Legitimate encoded strings (sprite sheets, serialized view state).
        url = f"{scheme}://{host}{_encoded_url_tail(rng)}"
    else:
        url = f"{scheme}://{host}{_benign_path(rng)}"
        query = _benign_query(rng)
        if query:
            url += "?" + query
    referrer = None
    if rng.random() < 0.75:
        ref_sld = dictionary[int(rng.integers(0, len(dictionary)))]
        referrer = f"{scheme}://www.{ref_sld}.com{_benign_path(rng)}"
    return _Flow(
        url=url,
        referrer=referrer,
        user_agent=_BROWSER_UAS[int(rng.integers(0, len(_BROWSER_UAS)))],
        mime_type=_MIMES[int(rng.integers(0, len(_MIMES)))],
        http_status=200 if rng.random() < 0.92 else 304,
        duration_ms=float(int(rng.integers(20, 900))),
        bytes_c2s=int(rng.integers(200, 2500)),
        bytes_s2c=int(rng.integers(1000, 120000)),
        server_port=443 if https else 80,
        domain=host,
        malicious=False,
    )


def _dga_domain(rng) -> str:
    length = int(rng.integers(8, 17))
    tld = _DGA_TLDS[int(rng.integers(0, len(_DGA_TLDS)))]
    return f"{_chars(rng, _DGA_ALPHABET, length)}.{tld}"


def _dga_flow(rng, domain: str) -> _Flow:
    style = int(rng.integers(0, 3))
    path = ("/", "/index.php", "/a")[style]
    url = f"http://{domain}{path}"
    ua = None
    if rng.random() < 0.6:
        ua = _SHORT_UAS[int(rng.integers(0, len(_SHORT_UAS)))]
    return _Flow(
        url=url,
        referrer=None,
        user_agent=ua,
        mime_type=None if rng.random() < 0.5 else "text/html",
        http_status=404 if rng.random() < 0.4 else 200,
        duration_ms=float(int(rng.integers(1, 120))),
        bytes_c2s=int(rng.integers(60, 400)),
        bytes_s2c=int(rng.integers(0, 900)),
        server_port=80,
        domain=domain,
        malicious=True,
    )


def _enc_domain(rng) -> str:
    tld = _DGA_TLDS[int(rng.integers(0, len(_DGA_TLDS)))]
    return f"{_word(rng)}{_word(rng)}{int(rng.integers(0, 99))}.{tld}"


def _enc_flow(rng, domain: str) -> _Flow:
    url = f"http://{domain}{_encoded_url_tail(rng)}"
    ua = None
    if rng.random() < 0.7:
        ua = _SHORT_UAS[int(rng.integers(0, len(_SHORT_UAS)))]
    return _Flow(
        url=url,
        referrer=None,
        user_agent=ua,
        mime_type=None if rng.random() < 0.6 else "application/octet-stream",
        http_status=200,
        duration_ms=float(int(rng.integers(5, 300))),
        bytes_c2s=int(rng.integers(300, 4000)),
        bytes_s2c=int(rng.integers(100, 3000)),
        server_port=80,
        domain=domain,
        malicious=True,
    )


def _class_counts(scenario: str, n: int) -> dict:
    if scenario == "benign":
        return {"benign": n, "dga": 0, "enc": 0}
    if scenario == "dga":
        return {"benign": 0, "dga": n, "enc": 0}
    if scenario == "enc":
        return {"benign": 0, "dga": 0, "enc": n}
    if scenario == "mixed":
        dga = n // 4
        enc = n // 4
        return {"benign": n - dga - enc, "dga": dga, "enc": enc}
    raise ValueError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")


def generate_corpus(scenario: str, n: int, seed: int) -> SynthCorpus:
    """Build n flows with exact per-class counts, shuffled deterministically."""
    counts = _class_counts(scenario, n)
    rng = _rng(seed, 1)
    dictionary = benign_dictionary(seed)

    n_users = max(4, n // 40)
    benign_users = [f"user{idx:05d}" for idx in range(n_users)]
    n_infected = max(1, n_users // 4)
    infected_users = benign_users[:n_infected]

    # DGA domains rotate: draw a fresh domain for most flows.
    dga_domains = [_dga_domain(rng) for _ in range(max(1, counts["dga"] // 3 + 1))]
    enc_domains = [_enc_domain(rng) for _ in range(max(1, counts["enc"] // 40 + 1))]

    entries = []
    for _ in range(counts["benign"]):
        flow = _benign_flow(rng, dictionary)
        user = benign_users[int(rng.integers(0, len(benign_users)))]
        entries.append((flow, user, "benign"))
    for i in range(counts["dga"]):
        domain = dga_domains[i % len(dga_domains)]
        flow = _dga_flow(rng, domain)
        user = infected_users[int(rng.integers(0, len(infected_users)))]
        entries.append((flow, user, "dga"))
    for i in range(counts["enc"]):
        domain = enc_domains[i % len(enc_domains)]
        flow = _enc_flow(rng, domain)
        user = infected_users[int(rng.integers(0, len(infected_users)))]
        entries.append((flow, user, "enc"))

    order = rng.permutation(len(entries))
    flows = []
    labels = []
    kinds = []
    malicious = []
    for pos, idx in enumerate(order):
        flow, user, kind = entries[int(idx)]
        log = ProxyLog(
            url=flow.url,
            user_id=user,
            referrer=flow.referrer,
            user_agent=flow.user_agent,
            mime_type=flow.mime_type,
            http_status=flow.http_status,
            duration_ms=flow.duration_ms,
            bytes_c2s=flow.bytes_c2s,
            bytes_s2c=flow.bytes_s2c,
            client_port=int(rng.integers(1024, 65536)),
            server_port=flow.server_port,
            timestamp=_BASE_TS + pos * 137,
        )
        flows.append(log)
        labels.append(1 if flow.malicious else 0)
        kinds.append(kind)
        if flow.malicious:
            malicious.append(flow.domain)
    return SynthCorpus(
        flows=flows,
        labels=labels,
        kinds=kinds,
        malicious_domains=sorted(set(malicious)),
        dictionary=dictionary,
        scenario=scenario,
        class_counts=counts,
    )


def bench_corpus(n: int, seed: int) -> list:
    """Flows for throughput runs: URL and referrer average ~150 characters.

    Malicious-looking flows keep their natural field profile (so a trained
    pipeline is exercised past level 0); benign flows carry long referrers.
    """
    rng = _rng(seed, 2)
    dictionary = benign_dictionary(seed)
    flows = []
    for i in range(n):
        kind = rng.random()
        if kind < 0.75:
            flow = _benign_flow(rng, dictionary)
            # Pad path and query toward the target average length.
            pad = _chars(rng, "abcdefghijklmnopqrstuvwxyz", 24)
            extra = "&".join(
                f"{_word(rng)[:6]}={_word(rng)}" for _ in range(int(rng.integers(3, 7)))
            )
            url = flow.url + ("&" if "?" in flow.url else "?") + extra + "&sid=" + pad
            flow.url = url
            target_ref = int(rng.integers(100, 160))
            ref_path = _chars(rng, "abcdefghijklmnopqrstuvwxyz/", target_ref)
            flow.referrer = f"http://www.{_word(rng)}{_word(rng)}.com/{ref_path}"
        elif kind < 0.9:
            flow = _enc_flow(rng, _enc_domain(rng))
        else:
            flow = _dga_flow(rng, _dga_domain(rng))
        flows.append(
            ProxyLog(
                url=flow.url,
                user_id=f"user{int(rng.integers(0, 5000)):05d}",
                referrer=flow.referrer,
                user_agent=flow.user_agent,
                mime_type=flow.mime_type,
                http_status=flow.http_status,
                duration_ms=flow.duration_ms,
                bytes_c2s=flow.bytes_c2s,
                bytes_s2c=flow.bytes_s2c,
                client_port=int(rng.integers(1024, 65536)),
                server_port=flow.server_port,
                timestamp=_BASE_TS + i * 101,
            )
        )
    return flows
