import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proxysieve.logmodel import (
    ParseError,
    ProxyLog,
    decompose_url,
    format_tsv12,
    parse_proxy_log,
    read_logs,
    recompose_url,
)

FULL_LINE = (
    "1700000000000\talice\thttp://www.example.com/a/b.php?k=v#top\t"
    "http://ref.example.org/\tMozilla/5.0\ttext/html\t200\t123.5\t"
    "400\t5120\t51544\t80"
)


class TestParseTsv12:
    def test_fully_populated_round_trip(self):
        log = parse_proxy_log(FULL_LINE, "tsv12")
        assert log.url == "http://www.example.com/a/b.php?k=v#top"
        assert log.user_id == "alice"
        assert log.referrer == "http://ref.example.org/"
        assert log.user_agent == "Mozilla/5.0"
        assert log.mime_type == "text/html"
        assert log.http_status == 200
        assert log.duration_ms == 123.5
        assert log.bytes_c2s == 400
        assert log.bytes_s2c == 5120
        assert log.client_port == 51544
        assert log.server_port == 80
        assert log.timestamp == 1700000000000
        assert format_tsv12(log) == FULL_LINE

    def test_empty_column_stays_missing(self):
        cols = FULL_LINE.split("\t")
        cols[3] = ""  # referrer
        log = parse_proxy_log("\t".join(cols), "tsv12")
        assert log.referrer is None

    def test_port_out_of_range(self):
        cols = FULL_LINE.split("\t")
        cols[10] = "99999"
        with pytest.raises(ParseError, match="out of range"):
            parse_proxy_log("\t".join(cols), "tsv12", line_no=7)

    def test_wrong_column_count(self):
        with pytest.raises(ParseError, match="12 tab-separated"):
            parse_proxy_log("a\tb\tc", "tsv12")

    def test_unparseable_number(self):
        cols = FULL_LINE.split("\t")
        cols[6] = "abc"
        with pytest.raises(ParseError, match="http_status"):
            parse_proxy_log("\t".join(cols), "tsv12")

    def test_empty_url_rejected(self):
        cols = FULL_LINE.split("\t")
        cols[2] = ""
        with pytest.raises(ParseError):
            parse_proxy_log("\t".join(cols), "tsv12")

    def test_line_number_carried_in_error(self):
        cols = FULL_LINE.split("\t")
        cols[10] = "99999"
        with pytest.raises(ParseError) as err:
            parse_proxy_log("\t".join(cols), "tsv12", line_no=17)
        assert err.value.line_no == 17
        assert "17" in str(err.value)


class TestParseJsonl:
    def test_round_trip(self):
        obj = {
            "url": "http://a.com/x",
            "user_id": "bob",
            "http_status": 404,
            "bytes_s2c": 10,
        }
        log = parse_proxy_log(json.dumps(obj), "jsonl")
        assert log.url == "http://a.com/x"
        assert log.http_status == 404
        assert log.referrer is None

    def test_unknown_field_rejected(self):
        with pytest.raises(ParseError, match="unknown fields"):
            parse_proxy_log('{"url": "http://a.com", "user_id": "u", "x": 1}', "jsonl")

    def test_invalid_json(self):
        with pytest.raises(ParseError, match="invalid JSON"):
            parse_proxy_log("{", "jsonl")


def test_read_logs_collects_errors():
    lines = [FULL_LINE, "broken line", FULL_LINE]
    errors = []
    logs = list(read_logs(lines, "tsv12", errors))
    assert len(logs) == 2
    assert len(errors) == 1 and errors[0].line_no == 2


def test_unsupported_format():
    with pytest.raises(ValueError, match="unsupported log format"):
        parse_proxy_log(FULL_LINE, "csv")


class TestDecomposeUrl:
    def test_reference_decomposition(self):
        p = decompose_url("http://www.example.com/a/b.php?k=v#top")
        assert p.protocol == "http"
        assert p.hostname == "www.example.com"
        assert p.second_level_domain == "example"
        assert p.top_level_domain == "com"
        assert p.path == "/a/b.php"
        assert p.filename == "b.php"
        assert p.query == "k=v"
        assert p.fragment == "top"
        assert p.subdomain_count == 1
        assert not p.host_is_ip

    def test_ipv4_host(self):
        p = decompose_url("http://10.0.0.1/x")
        assert p.host_is_ip
        assert p.second_level_domain == ""
        assert p.top_level_domain == ""
        assert p.path == "/x"
        assert p.subdomain_count == 0

    def test_connect_with_port(self):
        p = decompose_url("connect://host.com:443")
        assert p.protocol == "connect"
        assert p.hostname == "host.com"
        assert p.path == ""
        assert p.query == ""
        assert p.fragment == ""

    def test_no_scheme(self):
        p = decompose_url("host.com/path")
        assert p.protocol == ""
        assert p.hostname == "host.com"
        assert p.path == "/path"

    def test_fragment_before_query_goes_to_fragment(self):
        p = decompose_url("http://a.com/x#f?notquery")
        assert p.fragment == "f?notquery"
        assert p.query == ""
        assert p.path == "/x"

    def test_filename_requires_dot(self):
        assert decompose_url("http://a.com/dir/name").filename == ""
        assert decompose_url("http://a.com/dir/n.gif").filename == "n.gif"

    def test_ipv6_flagged(self):
        p = decompose_url("http://[::1]:8080/x")
        assert p.host_is_ip
        assert p.hostname == "[::1]"

    def test_case_preserved(self):
        p = decompose_url("HTTP://WwW.ExAmPle.CoM/PaTh")
        assert p.protocol == "HTTP"
        assert p.hostname == "WwW.ExAmPle.CoM"


_LABEL = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789-", min_size=1, max_size=8)


@st.composite
def well_formed_urls(draw):
    scheme = draw(st.sampled_from(["http", "https", "connect", "ftp"]))
    labels = draw(st.lists(_LABEL, min_size=1, max_size=4))
    host = ".".join(labels)
    port = draw(st.sampled_from(["", ":80", ":8443"]))
    segs = draw(st.lists(_LABEL, min_size=0, max_size=3))
    path = "".join("/" + s for s in segs)
    query = draw(st.one_of(st.just(""), _LABEL.map(lambda s: f"k={s}")))
    fragment = draw(st.one_of(st.just(""), _LABEL))
    url = f"{scheme}://{host}{port}{path}"
    if query:
        url += "?" + query
    if fragment:
        url += "#" + fragment
    return url, host, port


@settings(max_examples=300, deadline=None)
@given(well_formed_urls())
def test_decompose_recompose_round_trip(url_host_port):
    url, host, port = url_host_port
    parts = decompose_url(url)
    assert parts.hostname == host
    rebuilt = recompose_url(parts)
    assert rebuilt == url.replace(host + port, host, 1)


@settings(max_examples=300, deadline=None)
@given(st.text(min_size=1, max_size=60))
def test_decompose_is_total(s):
    parts = decompose_url(s)  # must never raise
    if not parts.host_is_ip:
        dots = parts.hostname.count(".")
        expected = max(0, (dots + 1) - 2) if parts.hostname else 0
        assert parts.subdomain_count == expected


def test_subdomain_count_rule():
    assert decompose_url("http://a.b.c.example.com/").subdomain_count == 3
    assert decompose_url("http://example.com/").subdomain_count == 0
    assert decompose_url("http://localhost/").subdomain_count == 0


def test_proxylog_validation():
    with pytest.raises(ParseError):
        ProxyLog(url="http://a.com", user_id="u", bytes_c2s=-1)
    with pytest.raises(ParseError):
        ProxyLog(url="http://a.com", user_id="")
