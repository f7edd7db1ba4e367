import json
import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from iuprep.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def w(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_romanize_round_trip(tmp_path, capsys):
    src = w(tmp_path / "in.txt", "ᓄᓇᕗᑦ ᐊᐊ\nWMT 2020\n")
    assert main(["romanize", src, "-o", str(tmp_path / "r.txt")]) == 0
    assert (tmp_path / "r.txt").read_text(encoding="utf-8") == "nunavut a'a\nWMT 2020\n"
    assert main(["deromanize", str(tmp_path / "r.txt")]) == 0
    assert capsys.readouterr().out == "ᓄᓇᕗᑦ ᐊᐊ\nWMT 2020\n"


def test_clean_writes_report(tmp_path, capsys):
    src = w(tmp_path / "a.en", "same\nsame\nI saw 3 seals\ngood morning\n")
    tgt = w(tmp_path / "a.iu", "same\nsame\ntakujara 4\nullaakkut\n")
    rc = main(["clean", "--src", src, "--tgt", tgt, "--out-src", str(tmp_path / "o.en"),
               "--out-tgt", str(tmp_path / "o.iu"), "--report", str(tmp_path / "rep.txt")])
    assert rc == 0
    assert (tmp_path / "o.en").read_text() == "good morning\n"
    report = (tmp_path / "rep.txt").read_text()
    assert "raw: 4\nselected: 1\nduplicates_removed: 1\n" in report
    assert "dropped.identical: 1" in report and "dropped.number_mismatch: 1" in report
    assert capsys.readouterr().out == report


def test_clean_disable_rule(tmp_path):
    src = w(tmp_path / "a.en", "same\n")
    tgt = w(tmp_path / "a.iu", "same\n")
    main(["-q", "clean", "--src", src, "--tgt", tgt, "--out-src", str(tmp_path / "o.en"),
          "--out-tgt", str(tmp_path / "o.iu"), "--disable", "identical"])
    assert (tmp_path / "o.en").read_text() == "same\n"


def test_alignment_error_exit_code(tmp_path, capsys):
    src = w(tmp_path / "a.en", "1\n2\n3\n")
    tgt = w(tmp_path / "a.iu", "1\n2\n")
    rc = main(["stats", "--src", src, "--tgt", tgt])
    assert rc == 2
    assert "3 vs 2" in capsys.readouterr().err


def test_bpe_learn_apply_detok(tmp_path, capsys):
    text = "low low low low low lower lower newest newest newest newest newest newest widest widest widest\n"
    corpus = w(tmp_path / "c.txt", text)
    model = tmp_path / "m.bpe"
    assert main(["-q", "learn-bpe", corpus, "--merges", "4", "-o", str(model),
                 "--vocab", str(tmp_path / "v.txt")]) == 0
    assert model.read_text().splitlines()[1:] == ["e s", "es t", "est </w>", "l o"]
    assert main(["apply-bpe", "--model", str(model), w(tmp_path / "x", "lowest\n"),
                 "-o", str(tmp_path / "seg")]) == 0
    assert (tmp_path / "seg").read_text() == "lo w est</w>\n"
    assert main(["detok", str(tmp_path / "seg")]) == 0
    assert capsys.readouterr().out == "lowest\n"


def test_mix_command(tmp_path):
    a_en = w(tmp_path / "a.en", "a1\na2\na3\na4\n")
    a_iu = w(tmp_path / "a.iu", "x1\nx2\nx3\nx4\n")
    b_en = w(tmp_path / "b.en", "b1\nb2\n")
    b_fi = w(tmp_path / "b.fi", "y1\ny2\n")
    out = tmp_path / "mixed"
    rc = main(["mix", "--dataset", "A", a_en, a_iu, "en", "iu", "2",
               "--dataset", "B", b_en, b_fi, "en", "fi", "1",
               "--directions", "en-iu", "en-fi", "--no-shuffle", "--cycles", "2",
               "--out", str(out)])
    assert rc == 0
    assert (out / "train.00000.txt").read_text().splitlines() == [
        "<2iu> a1\tx1", "<2iu> a2\tx2", "<2fi> b1\ty1", "<2iu> a3\tx3", "<2iu> a4\tx4", "<2fi> b2\ty2"]
    assert json.loads((out / "manifest.json").read_text())["mix"]["cycle_length"] == 3


def test_mix_bad_direction(tmp_path, capsys):
    en = w(tmp_path / "a.en", "a\n")
    fi = w(tmp_path / "a.fi", "b\n")
    rc = main(["mix", "--dataset", "A", en, fi, "en", "fi", "1", "--directions", "en-et",
               "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "en-et" in capsys.readouterr().err


def test_score(tmp_path, capsys):
    hyp = w(tmp_path / "h", "the cat sat on the mat\n")
    ref = w(tmp_path / "r", "the cat sat on the mat\n")
    assert main(["score", "--hyp", hyp, "--ref", ref, "--report", str(tmp_path / "rep.json")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("BLEU = 100.0 ")
    assert json.loads((tmp_path / "rep.json").read_text())["score"] == pytest.approx(100.0)


def test_score_bpe_and_deromanize(tmp_path, capsys):
    hyp = w(tmp_path / "h", "nu na vut</w> nu na vut</w>\n")
    ref = w(tmp_path / "r", "ᓄᓇᕗᑦ ᓄᓇᕗᑦ\n")
    assert main(["score", "--hyp", hyp, "--ref", ref, "--bpe", "--deromanize"]) == 0
    out = capsys.readouterr().out
    assert "script.syllabics" in out
    # a two-token hypothesis has no 3- or 4-grams, so unsmoothed BLEU is 0
    assert out.startswith("BLEU = 0.0 100.0/100.0/0.0/0.0")


def test_stats(tmp_path, capsys):
    main(["stats", "--src", w(tmp_path / "a", "ab cd\n"), "--tgt", w(tmp_path / "b", "efg\n")])
    out = capsys.readouterr().out
    assert "segment_count: 1" in out
    assert "src_avg_token_len: 2.0000" in out and "tgt_avg_token_len: 3.0000" in out


def test_config_defaults_and_check(tmp_path, capsys):
    assert main(["config", "--defaults"]) == 0
    defaults = yaml.safe_load(capsys.readouterr().out)
    assert sum(d["weight"] for d in defaults["datasets"]) == 45
    assert main(["config", "--check", str(FIXTURES / "tiny.yaml")]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["cycle_length"] == 28


def test_config_check_rejects_stage_order(tmp_path, capsys):
    cfg = yaml.safe_load((FIXTURES / "tiny.yaml").read_text())
    cfg["stages"] = ["bpe", "romanize"]
    for d in cfg["datasets"]:
        d["src"] = str(FIXTURES / d["src"])
        d["tgt"] = str(FIXTURES / d["tgt"])
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(cfg))
    assert main(["config", "--check", str(path)]) == 2
    assert "order" in capsys.readouterr().err


def test_run_with_overrides(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["--seed", "3", "run", str(FIXTURES / "tiny.yaml"), "--output-dir", str(out)]) == 0
    assert "run complete" in capsys.readouterr().out
    assert json.loads((out / "manifest.json").read_text())["seed"] == 3


def test_console_script_version():
    res = subprocess.run([sys.executable, "-m", "iuprep.cli", "--version"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("iuprep ")
