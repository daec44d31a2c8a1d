import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pitcheck.errors import ConfigError, DomainError, EmptySample
from pitcheck.io import ParseError, dumps, fmt_float, read_sample, read_values
from pitcheck.pitlab import ConjugateHierSpec, LowRankCopulaSpec, StudentT
from pitcheck.pitlab.config import load_config, parse_config


@settings(max_examples=500)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_float_round_trips(x):
    assert float(fmt_float(x)) == x


def test_fmt_float_special():
    assert fmt_float(math.nan) == "null"
    assert fmt_float(3.0) == "3.0"


def test_dumps_round_trip_and_sorted():
    doc = {"b": [0.1, 2, None, True], "a": {"z": np.float64(1 / 3), "y": np.int64(4)}}
    text = dumps(doc)
    back = json.loads(text)
    assert back == {"a": {"y": 4, "z": 1 / 3}, "b": [0.1, 2, None, True]}
    assert text.index('"a"') < text.index('"b"')


def test_read_text_with_comments(tmp_path):
    p = tmp_path / "u.txt"
    p.write_text("# header\n0.1\n\n0.5  # mid\n0.9\n")
    assert read_values(p)[0] == [0.1, 0.5, 0.9]


def test_read_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "u.txt"
    p.write_text("0.1\nabc\n")
    with pytest.raises(ParseError, match="line 2"):
        read_values(p)
    p.write_text("0.1\n0.2\n1.2\n")
    with pytest.raises(DomainError, match="line 3"):
        read_values(p)
    p.write_text("")
    with pytest.raises(EmptySample):
        read_sample(p)


def test_read_csv_columns(tmp_path):
    p = tmp_path / "u.csv"
    p.write_text("id,pit\n1,0.25\n2,0.75\n")
    assert read_values(p, column="pit")[0] == [0.25, 0.75]
    assert read_values(p, column="1")[0] == [0.25, 0.75]
    q = tmp_path / "v.csv"
    q.write_text("0.2,0.3\n0.4,0.5\n")
    assert read_values(q)[0] == [0.2, 0.4]
    with pytest.raises(ParseError):
        read_values(p, column="missing")


def test_read_json_forms(tmp_path):
    p = tmp_path / "u.json"
    p.write_text("[0.1, 0.2]")
    assert read_sample(p).values.tolist() == [0.1, 0.2]
    p.write_text('{"values": [0.25, 0.5], "kind": "rank", "draws": 4}')
    s = read_sample(p)
    assert s.kind == "rank" and s.draws == 4
    p.write_text('[0.1, "x"]')
    with pytest.raises(ParseError):
        read_values(p)


def test_format_override(tmp_path):
    p = tmp_path / "u.dat"
    p.write_text("[0.3]")
    assert read_values(p, fmt="json")[0] == [0.3]


def test_parse_config_conjugate_defaults():
    cfg = parse_config("dgp = student_t\nnu = 3\nG = 50\nm = 5\nmethods = potc, ks\n")
    s = cfg.spec
    assert isinstance(s, ConjugateHierSpec) and s.dgp == StudentT(3.0)
    assert (s.sigma, s.tau) == (0.06, 1.96)
    assert cfg.methods == ["potc", "ks"] and cfg.combiner == "tcct"
    assert cfg.resolved()["spec"]["dgp"]["family"] == "student_t"


def test_parse_config_errors():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("G = 5\nbogus = 1\nm = 2")
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("G = 5\nm = 2\nnu = 3")  # nu does not apply to the normal dgp
    with pytest.raises(ConfigError):
        parse_config("G = 5")
    with pytest.raises(ConfigError):
        parse_config("G = five\nm = 2")
    with pytest.raises(ConfigError):
        parse_config('{"G": 5, "m": {"x": 1}}', fmt="json")


def test_parse_config_copula(tmp_path):
    cfg = parse_config("model = copula\nn = 40\np = 2\ntarget_corr = 0.1\nseed = 3")
    assert isinstance(cfg.spec, LowRankCopulaSpec) and 0 < cfg.spec.loading_scale < 1
    p = tmp_path / "c.json"
    p.write_text('{"model": "copula", "n": 10, "loading_scale": 0.3}')
    assert load_config(p).spec.loading_scale == 0.3
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
