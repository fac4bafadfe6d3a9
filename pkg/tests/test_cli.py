import json
from pathlib import Path

import pytest

from bunched.cli import main
from bunched.corpus import Entry, kernel_entries, load_corpus, cut_entries
from bunched.interchange import loads

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_prove_emits_a_checkable_derivation(capsys, tmp_path):
    code, out, err = run(capsys, "prove", "a * b |- b * a", "--depth", "8")
    assert code == 0 and "proved" in err
    d = loads(out)
    assert str(d.conclusion) == "a * b |- b * a"
    path = tmp_path / "swap.json"
    path.write_text(out)
    code, out, _ = run(capsys, "check", path)
    assert code == 0 and out.startswith("accepted")


def test_prove_failure_and_emit(capsys, tmp_path):
    assert run(capsys, "prove", "a * b |- a", "--depth", "12")[0] == 1
    target = tmp_path / "aff.json"
    code, out, _ = run(capsys, "prove", "a * b |- a", "--rules", DATA / "rules" / "affine.rules", "--emit", target)
    assert code == 0 and "StructExt" in out
    assert run(capsys, "check", target)[0] == 1
    assert run(capsys, "check", target, "--rules", DATA / "rules" / "affine.rules")[0] == 0


def test_check_illegal_cut(capsys):
    entry = DATA / "corpus" / "kernel" / "kernel-Cut-accept.json"
    code, _, err = run(capsys, "check", entry)
    assert code == 1 and "illegal rule" in err
    assert run(capsys, "check", entry, "--allow-cut")[0] == 0


def test_s4_flag(capsys):
    entry = DATA / "corpus" / "kernel" / "kernel-BoxR-accept.json"
    assert run(capsys, "check", entry)[0] == 1
    assert run(capsys, "check", entry, "--s4")[0] == 0
    code, out, _ = run(capsys, "prove", "box a |- box box a", "--s4")
    assert code == 0 and loads(out).height == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["prove", "a |-"],
        ["check", "/nonexistent/file.json"],
        ["prove", "a |- a", "--rules", "/nonexistent.rules"],
        ["frobnicate"],
        ["prove", "a |- a", "--depth", "many"],
    ],
)
def test_malformed_input_exits_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bad_documents_exit_2(capsys, tmp_path):
    for text in ["{oops", '{"rule": "Ax"}', '{"rule": "SepL", "conclusion": "a |- a", "params": {"path": "L,"}}']:
        p = tmp_path / "bad.json"
        p.write_text(text)
        assert run(capsys, "check", p)[0] == 2


def test_invert(capsys, tmp_path):
    src = tmp_path / "pq.json"
    assert run(capsys, "prove", "p , (p /\\ q) |- p * q", "--emit", src)[0] == 0
    code, out, err = run(capsys, "invert", src, "--rule", "andL", "--path", "R,")
    assert code == 0
    assert str(loads(out).conclusion) == "p , (p ; q) |- p * q"
    assert "height" in err
    assert run(capsys, "invert", src, "--rule", "sepL", "--path", "R,")[0] == 2
    assert run(capsys, "invert", src, "--rule", "andL")[0] == 2
    assert run(capsys, "invert", src, "--rule", "andL", "--path", "L;")[0] == 2
    wand = tmp_path / "wand.json"
    run(capsys, "prove", "b |- a -* a * b", "--emit", wand)
    code, out, _ = run(capsys, "invert", wand, "--rule", "wandR")
    assert code == 0 and str(loads(out).conclusion) == "b , a |- a * b"


def test_model_check(capsys, tmp_path):
    heap = DATA / "pcm" / "heap2.pcm"
    code, out, _ = run(capsys, "model-check", heap, "a * b |- a")
    assert code == 1 and out.startswith("false")
    code, out, _ = run(capsys, "model-check", heap, "a * b |- b * a")
    assert code == 0 and "256 valuations" in out
    val = DATA / "valuation" / "heap2.val"
    assert run(capsys, "model-check", heap, "--valuation", val, "a , b |- a * b")[0] == 0
    assert run(capsys, "model-check", heap, "--valuation", val, "a , c |- a")[0] == 2
    entry = DATA / "corpus" / "cut" / "cut-bi-00.json"
    assert run(capsys, "model-check", heap, entry)[0] == 0


def test_closure_lab(capsys):
    code, out, _ = run(capsys, "closure-lab", DATA / "pcm" / "idem.pcm", DATA / "basis" / "full.basis")
    assert code == 0
    assert "closed sets (1)" in out and "strong: true" in out and "all laws hold" in out
    code, out, _ = run(capsys, "closure-lab", DATA / "pcm" / "idem.pcm", DATA / "basis" / "discrete.basis")
    assert code == 0 and "closed sets (4)" in out
    assert run(capsys, "closure-lab", DATA / "pcm" / "idem.pcm", DATA / "pcm" / "idem.pcm")[0] == 2


def test_closure_lab_refusal(capsys, tmp_path):
    basis = tmp_path / "e.basis"
    basis.write_text("{e}\n")
    code, out, _ = run(capsys, "closure-lab", DATA / "pcm" / "idem.pcm", basis)
    assert code == 1 and "strong: false" in out and "refused" in out


def test_corpus_run(capsys):
    code, out, _ = run(capsys, "corpus-run", DATA / "corpus" / "kernel")
    assert code == 0 and out.strip().splitlines()[-1].startswith("48/48 passed")
    code, out, _ = run(capsys, "corpus-run", DATA / "corpus")
    assert code == 0 and out.strip().splitlines()[-1].startswith("91/91 passed")


def test_corpus_run_reports_failures(capsys, tmp_path):
    # flip one expectation
    doc = json.loads((DATA / "corpus" / "kernel" / "kernel-Ax-reject.json").read_text())
    doc["expect"] = "accept"
    (tmp_path / "flipped.json").write_text(json.dumps(doc))
    code, out, _ = run(capsys, "corpus-run", tmp_path)
    assert code == 1 and out.startswith("FAIL") and "0/1 passed" in out
    assert run(capsys, "corpus-run", tmp_path / "empty")[0] == 2


def test_shipped_corpus_is_current():
    shipped = {e.name: e.to_doc() for e in load_corpus(DATA / "corpus")}
    fresh = {e.name: e.to_doc() for e in kernel_entries() + cut_entries()}
    assert shipped == fresh


def test_entry_round_trip():
    for e in kernel_entries()[:6]:
        again = Entry.from_doc(json.loads(json.dumps(e.to_doc())))
        assert again.derivation == e.derivation and again.config == e.config
