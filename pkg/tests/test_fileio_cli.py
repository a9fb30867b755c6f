import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import BASE3_W8
from pointline import fileio, svg
from pointline.cli import main, rational
from pointline.geometry import Configuration, trivial_configuration

omega_float = st.floats(-1, 1, allow_nan=False, allow_subnormal=True)


@given(arrays(np.float64, st.tuples(st.integers(0, 20), st.just(3)), elements=omega_float,
              unique=True))
def test_round_trip_bit_exact(c):
    c = np.unique(c, axis=0)
    X = Configuration(c, claimed_delta=5e-324, provenance="rt")
    Y = fileio.loads(fileio.dumps(X))
    assert Y.coords.tobytes() == X.coords.tobytes()
    assert Y.claimed_delta == X.claimed_delta and Y.provenance == "rt"


def test_round_trip_subnormals_and_signed_zero():
    c = np.array([[5e-324, -2.2250738585072014e-308, -0.0], [1e-310, 0.0, 1.0]])
    Y = fileio.loads(fileio.dumps(Configuration(c)))
    assert Y.coords.tobytes() == c.tobytes()


def test_labels_optional(base3, singleton):
    from pointline.recursive import EXPLORATORY, ComposeParams, compose

    out, _ = compose(base3, singleton, ComposeParams(1 / 8), mode=EXPLORATORY)
    assert fileio.loads(fileio.dumps(out)).labels is None
    back = fileio.loads(fileio.dumps(out, include_labels=True))
    assert np.array_equal(back.labels, out.labels)


def test_file_layout():
    text = fileio.dumps(trivial_configuration(2))
    doc = json.loads(text)
    assert doc["format_version"] == 1
    assert doc["elements"] == [["0.0", "-0.5", "0.0"], ["0.0", "0.5", "0.0"]]
    assert doc["claimed_delta"] == "1.0"


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"format_version": 2, "elements": []}',
    '{"format_version": 1}',
    '{"format_version": 1, "elements": [["0", "0"]]}',
    '{"format_version": 1, "elements": [["0", "x", "0"]]}',
    '{"format_version": 1, "elements": [[true, "0", "0"]]}',
    '{"format_version": 1, "elements": [], "labels": [["a"]]}',
])
def test_malformed(text):
    with pytest.raises(fileio.FileFormatError):
        fileio.loads(text)


def test_csv_round_trip(rng):
    X = Configuration(rng.uniform(-1, 1, (40, 3)))
    text = fileio.to_csv(X)
    assert text.splitlines()[0] == "x,y,theta"
    assert fileio.from_csv(text).same_elements(X)
    with pytest.raises(fileio.FileFormatError):
        fileio.from_csv("a,b,c\n1,2,3\n")


def test_svg_counts(rng):
    X = Configuration(rng.uniform(-1, 1, (37, 3)))
    plain = svg.render(X)
    assert plain.count("<circle") == 37 and plain.count("<line") == 37
    assert 'class="strip"' not in plain
    banded = svg.render(X, strip_width=0.01)
    assert banded.count('class="strip"') == 37


@pytest.mark.parametrize("theta", [-1.0, -0.3, 0.0, 0.7, 1.0])
def test_clip_line_inside(theta):
    (ax, ay), (bx, by) = svg.clip_line(0.4, -0.9, theta)
    for v in (ax, ay, bx, by):
        assert -1 - 1e-12 <= v <= 1 + 1e-12
    assert ax <= bx


def test_rational():
    assert rational("1/64") == 0.015625
    assert rational("1e-3") == 0.001
    with pytest.raises(Exception):
        rational("1/0")


# ---------------------------------------------------------------- CLI


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_random(tmp_path, capsys):
    out = tmp_path / "x.json"
    code, text, _ = run(["build-random", "--delta", "1e-3", "--seed", 7, "--out", out], capsys)
    assert code == 0
    X = fileio.load(out)
    assert len(X) >= 345 and X.claimed_delta >= 1e-3
    rep = json.loads((tmp_path / "x.report.json").read_text())
    assert rep["measured_delta"] == X.claimed_delta and rep["success"]
    out2 = tmp_path / "y.json"
    run(["--threads", 3, "build-random", "--delta", "1/1000", "--seed", 7, "--out", out2], capsys)
    assert out.read_bytes() == out2.read_bytes()


def test_build_random_delta_too_large(tmp_path, capsys):
    code, _, err = run(["build-random", "--delta", "0.5", "--out", tmp_path / "x.json"], capsys)
    assert code == 2 and "delta too large" in err


def test_compose_cli(tmp_path, capsys):
    base = tmp_path / "base.json"
    fileio.save(Configuration(BASE3_W8), base)
    out = tmp_path / "c.json"
    code, text, _ = run(["compose", "--base", base, "--w", "1/8", "--C", 5, "--depth", 1,
                         "--mode", "exploratory", "--out", out], capsys)
    assert code == 0 and len(fileio.load(out)) == 45
    code, text, _ = run(["compose", "--base", base, "--w", "1/8", "--depth", 2,
                         "--mode", "exploratory", "--out", out], capsys)
    assert code == 0
    X = fileio.load(out)
    assert len(X) == 2025 and X.claimed_delta == 2.0**-12
    rep = json.loads((tmp_path / "c.report.json").read_text())
    assert [r["n"] for r in rep["level_table"]] == [45, 2025]
    assert "gain_factor" in text


def test_compose_cli_preconditions(tmp_path, capsys):
    base = tmp_path / "base.json"
    fileio.save(trivial_configuration(3), base)
    code, _, err = run(["compose", "--base", base, "--w", "1/8", "--C", 2, "--out",
                        tmp_path / "c.json"], capsys)
    assert code == 2 and "C = 2" in err
    code, _, err = run(["compose", "--base", base, "--w", "1/128", "--out",
                        tmp_path / "c.json"], capsys)
    assert code == 2 and "d(X0) = 0.666667 < 4C^2w = 0.78125" in err


def test_verify(tmp_path, capsys):
    f = tmp_path / "t.json"
    fileio.save(trivial_configuration(10), f)
    code, text, _ = run(["verify", f, "--exact"], capsys)
    assert code == 0 and "PASS" in text and "witness" in text
    code, text, _ = run(["verify", f, "--json"], capsys)
    doc = json.loads(text)
    assert doc["passed"] and doc["claimed_delta"] == 0.2

    c = trivial_configuration(10).coords.copy()
    c[4, 1] += 1e-3
    fileio.save(Configuration(c, claimed_delta=0.2), f)
    code, text, _ = run(["verify", f, "--json"], capsys)
    doc = json.loads(text)
    assert code == 1 and not doc["passed"] and 4 in doc["witness"][:2]

    fileio.save(Configuration([[0.1, 0.2, 0.3]]), f)
    code, text, _ = run(["verify", f], capsys)
    assert code == 0 and "degenerate" in text


def test_verify_sampled_only_above_cap(tmp_path, capsys):
    f = tmp_path / "t.json"
    fileio.save(trivial_configuration(10), f)
    code, _, err = run(["verify", f, "--sampled"], capsys)
    assert code == 2 and "--exact" in err


def test_verify_errors(tmp_path, capsys):
    code, _, _ = run(["verify", tmp_path / "missing.json"], capsys)
    assert code == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    code, _, err = run(["verify", bad], capsys)
    assert code == 3 and "malformed" in err
    outside = tmp_path / "outside.json"
    outside.write_text('{"format_version": 1, "elements": [["2", "0", "0"]]}')
    code, _, _ = run(["verify", outside], capsys)
    assert code == 2


def test_export(tmp_path, capsys):
    f = tmp_path / "t.json"
    fileio.save(trivial_configuration(12), f)
    s, c = tmp_path / "t.svg", tmp_path / "t.csv"
    code, _, _ = run(["export", f, "--svg", s, "--csv", c, "--strip-width", "1/12"], capsys)
    assert code == 0
    text = s.read_text()
    assert text.count("<circle") == 12 and text.count('class="strip"') == 12
    assert fileio.from_csv(c.read_text()).same_elements(trivial_configuration(12))


def test_trivial_and_search(tmp_path, capsys):
    f = tmp_path / "t.json"
    assert run(["trivial", "--n", 7, "--out", f], capsys)[0] == 0
    assert fileio.load(f).claimed_delta == 2 / 7
    code, text, _ = run(["search-base", "--k", 3, "--target", "2/3", "--budget", 300,
                         "--out", tmp_path / "s.json"], capsys)
    assert code == 0 and "target met: True" in text
    code, _, _ = run(["search-base", "--k", 12, "--target", "1.9", "--budget", 20,
                      "--out", tmp_path / "s.json"], capsys)
    assert code == 1


def test_module_entry_point(tmp_path):
    f = tmp_path / "t.json"
    r = subprocess.run([sys.executable, "-m", "pointline", "trivial", "--n", "4", "--out", str(f)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and fileio.load(f).claimed_delta == 0.5
