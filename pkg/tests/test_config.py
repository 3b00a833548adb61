import pytest

from fundom.config import Entry, RunConfig, load_config, parse_config, to_bool
from fundom.errors import ConfigError


def test_sections_comments_and_keys():
    text = """
# comment
; also a comment
seed = 4
[render]
max-step = 0.01
Width=512
[Common]
threads = 2
"""
    es = parse_config(text, "run.cfg")
    assert [(e.section, e.key, e.value, e.line) for e in es] == [
        ("common", "seed", "4", 4),
        ("render", "max_step", "0.01", 6),
        ("render", "width", "512", 7),
        ("common", "threads", "2", 9),
    ]
    assert all(e.source == "run.cfg" for e in es)


def test_value_may_contain_equals():
    (e,) = parse_config("word = U1=H")
    assert e.value == "U1=H"


@pytest.mark.parametrize("text,line", [
    ("seed 4", 1),
    ("a = 1\n[render", 2),
    ("a = 1\n\n[]", 3),
    ("= 3", 1),
])
def test_malformed_lines_report_position(text, line):
    with pytest.raises(ConfigError, match=f"cfg:{line}:"):
        parse_config(text, "cfg")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_load_config(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("[trace]\nrho = 2\n")
    (e,) = load_config(p)
    assert (e.section, e.key, e.value, e.source) == ("trace", "rho", "2", str(p))


@pytest.mark.parametrize("v,b", [("1", True), ("Yes", True), ("on", True), ("false", False), ("0", False), ("OFF", False)])
def test_to_bool(v, b):
    assert to_bool(Entry("common", "k", v, 1, "s")) is b


def test_to_bool_rejects():
    with pytest.raises(ConfigError, match="s:7: field k"):
        to_bool(Entry("common", "k", "maybe", 7, "s"))


def test_run_config_dict():
    rc = RunConfig("trace", "gamma", (-1.0, 1.0, -1.0, 1.0), seed=2, step={"max_step": 0.01})
    d = rc.to_dict()
    assert d["command"] == "trace" and d["window"] == [-1.0, 1.0, -1.0, 1.0]
    assert d["seed"] == 2 and d["threads"] == 1 and d["step"] == {"max_step": 0.01} and d["params"] == {}
