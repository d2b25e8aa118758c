import json
import re
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpstar import backends as bk
from cpstar import cli
from cpstar import corpus
from cpstar import formats
from cpstar.errors import ParseError

DATA = Path(formats.corpus_dirs()[-1])
ALG_FILES = sorted(DATA.glob("*.alg"))
MOR_FILES = sorted(DATA.glob("*.mor"))


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def result_block(out):
    m = re.search(r"```result\n(.*)\n```", out, re.S)
    assert m, out
    return json.loads(m.group(1))


def test_shipped_corpus_present():
    names = {p.stem for p in ALG_FILES}
    for n in ["pants1", "pants2", "pants3", "diag2", "diag3", "diag4", "c_plus_m2",
              "z2", "z3", "z2xz2", "z2_rel", "z3_rel", "z2xz2_rel",
              "indiscrete1", "indiscrete2", "indiscrete3"]:
        assert n in names
    assert {p.stem for p in MOR_FILES} >= {"transpose2", "depolarizing2", "decoherence2",
                                           "stochastic2"}


@pytest.mark.parametrize("path", ALG_FILES, ids=lambda p: p.stem)
def test_algebra_round_trip(path):
    a = formats.parse_algebra(path.read_text())
    b = formats.parse_algebra(formats.write_algebra(a))
    assert a.name == b.name and a.backend == b.backend
    assert bk.equal(a.mult, b.mult) and bk.equal(a.unit, b.unit)
    assert formats.write_algebra(b) == path.read_text()


@pytest.mark.parametrize("path", MOR_FILES, ids=lambda p: p.stem)
def test_morphism_round_trip(path):
    s = formats.load_morphism(path)
    text = formats.write_morphism(s.morphism, s.source_ref, s.target_ref, s.name)
    assert text == path.read_text()
    again = formats.parse_morphism(text, path.parent)
    assert bk.equal(again.morphism, s.morphism)


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2),
                          st.floats(-5, 5), st.floats(-5, 5)), max_size=10))
def test_fhilb_text_round_trip(entries):
    text = "backend fhilb\ndim 3\nunit 0 1.0 0.0\n" + "".join(
        f"mult {i} {j} {k} {re!r} {im!r}\n" for i, j, k, re, im in entries)
    a = formats.parse_algebra(text)
    b = formats.parse_algebra(formats.write_algebra(a))
    assert np.array_equal(a.mult.payload, b.mult.payload)


def test_labels_and_comments():
    a = formats.parse_algebra("# Z2\nbackend rel\ncarrier e g\n"
                              "mult e e e\nmult g g e  # g is self-inverse\n"
                              "mult e g g\nmult g e g\nunit e\n")
    assert bk.equal(a.mult, corpus.algebra_corpus()["z2_rel"].mult)


@pytest.mark.parametrize("text", [
    "dim 2\nmult 0 0 0 1 0\n",
    "backend fhilb\ndim 2\nmult 0 0 9 1 0\n",
    "backend fhilb\ndim 2\nmult 0 0 0 x 0\n",
    "backend quantum\ndim 2\n",
    "backend rel\ndim 2\nmult 0 0 0 1 0\n",
    "backend fhilb\ndim 2\ncolour red\n",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        formats.parse_algebra(text)


def test_corpus_env(tmp_path, monkeypatch):
    (tmp_path / "mine.alg").write_text((DATA / "diag2.alg").read_text())
    monkeypatch.setenv(formats.CORPUS_ENV, str(tmp_path))
    assert formats.resolve_algebra("mine").dim == 2


# -- CLI --------------------------------------------------------------------------------

def test_verify_pants2(capsys):
    code, out = run(capsys, "verify", str(DATA / "pants2.alg"))
    assert code == 0
    r = result_block(out)
    assert np.allclose(r["normaliser_eigenvalues"], [2 ** -0.5] * 4)
    assert "0.707107" in out


def test_check_cp_transpose(capsys):
    code, out = run(capsys, "check-cp", str(DATA / "transpose2.mor"))
    assert code == 1
    assert "min rearrangement eigenvalue -1" in out
    r = result_block(out)
    assert r["verdicts"]["rearrange"]["min_eig"] == pytest.approx(-1.0)


def test_classify_c_plus_m2(capsys):
    code, out = run(capsys, "classify", str(DATA / "c_plus_m2.alg"))
    assert code == 0 and result_block(out)["factors"] == [1, 2]


def test_classify_rel(capsys):
    code, out = run(capsys, "classify", "indiscrete2")
    r = result_block(out)
    assert code == 0 and r["groupoid"]["indiscrete"] and r["groupoid"]["morphisms"] == 4


@pytest.mark.parametrize("path", MOR_FILES, ids=lambda p: p.stem)
def test_check_cp_methods_agree(capsys, path):
    code, out = run(capsys, "check-cp", str(path), "--method", "all")
    r = result_block(out)
    assert r["methods_agree"]
    assert code == (0 if r["passed"] else 1)


def test_embed_round_trips(capsys):
    code, out = run(capsys, "embed", "--pants", "2", "--backend", "rel")
    assert code == 0
    a = formats.parse_algebra(out)
    assert a.dim == 4 and bk.equal(a.mult, corpus.pants_data(2, "rel").mult)


def test_povm_and_split(capsys):
    code, out = run(capsys, "povm", "noisy2")
    assert code == 0 and result_block(out)["completeness_defect"] <= 1e-9
    code, out = run(capsys, "split", "c_plus_m2")
    assert code == 0 and result_block(out)["rank"] == 5


def test_tol_flag(capsys):
    code, _ = run(capsys, "--tol", "1e-6", "verify", "diag3")
    assert code == 0


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("backend fhilb\ndim 2\nmult 0 0 5 1 0\n")
    assert run(capsys, "verify", str(bad))[0] == 2
    assert run(capsys, "verify", "no_such_algebra")[0] == 2
    broken = tmp_path / "broken.alg"
    broken.write_text("backend fhilb\ndim 2\nmult 0 0 0 1 0\nunit 0 1 0\n")
    assert run(capsys, "verify", str(broken))[0] == 1
    wrong = tmp_path / "wrong.mor"
    wrong.write_text("source pants2\ntarget diag2\nentry 5 0 1 0\n")
    assert run(capsys, "check-cp", str(wrong))[0] == 2


def test_selftest_single_criterion(capsys):
    code, out = run(capsys, "selftest", "--level", "quick", "--only", "10")
    assert code == 0 and "[PASS] criterion 10" in out
