from pathlib import Path

from main import main

ROOT = str(Path(__file__).parent / "corpus")


def _edit(path, old, new):
    text = path.read_text(encoding="utf-8")
    assert old in text
    path.write_text(text.replace(old, new, 1), encoding="utf-8")


def test_verify_shipped_corpus(capsys):
    assert main(["verify", ROOT]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "2.22/Qtilde S=43/60 beta=17/60 OK" in out
    assert out[-1] == "32 certificates"


def test_verify_mutated_corpus(corpus_copy, capsys):
    _edit(corpus_copy / "2.22" / "certs" / "div_Qtilde.toml", 'E = "u-1"', 'E = "1-u"')
    assert main(["verify", str(corpus_copy)]) == 1
    out = capsys.readouterr().out
    assert "2.22/Qtilde S=" in out
    assert "FAILED negative-nonneg" in out


def test_verify_empty_corpus(tmp_path, capsys):
    assert main(["verify", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == "0 certificates"


def test_verify_missing_root(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing")]) == 2
    assert capsys.readouterr().out.startswith("error: ")


def test_parse_error_exit_status(corpus_copy, capsys):
    _edit(corpus_copy / "4.13" / "certs" / "div_E.toml", "tau = 2\n", "tau = 2.5\n")
    assert main(["verify", str(corpus_copy)]) == 2
    assert "div_E.toml:" in capsys.readouterr().out


def test_report_machine(capsys):
    assert main(["report", ROOT, "--machine"]) == 0
    out = capsys.readouterr().out.splitlines()
    for line in ("4.13.Rxy.beta=3/52", "4.13.E.beta=17/52", "3.13.E.beta=1/10", "3.13.S.beta=1/20"):
        assert line in out
    assert "3.13.ODP-Ga.printed.beta=-1/40" in out
    assert "2.22.Ct.printed.S_curve=53/80" in out
    assert "2.22.Ct.computed.S_curve=19/30" in out
    assert "2.22.complete=true" in out


def test_report_table(capsys):
    assert main(["report", ROOT]) == 0
    out = capsys.readouterr().out
    assert "Family 4.13" in out
    assert "beta=3/52" in out
    assert "printed L1.S_curve=31/32 computed=229/224" in out
    assert "printed CQ.S_curve=159/224 computed=17/28" in out


def test_oracle(capsys):
    assert main(["oracle", ROOT, "--samples", "25", "--seed", "7"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[-1] == "18 flag certificates, 0 mismatches"


def test_oracle_verdict_does_not_depend_on_seed(capsys):
    assert main(["oracle", ROOT, "--samples", "3", "--seed", "2024"]) == 0


def test_oracle_finds_mutated_coefficient(corpus_copy, capsys):
    _edit(corpus_copy / "2.22" / "certs" / "flag_l.toml", 'f1 = "v-u"', 'f1 = "2*v-2*u"')
    assert main(["oracle", str(corpus_copy), "--samples", "5"]) == 1
    out = capsys.readouterr().out
    assert "2.22/l points=" in out and "MISMATCH" in out
    assert "  u0/v1 (u,v)=" in out


def test_pfaffian(capsys):
    assert main(["pfaffian"]) == 0
    out = capsys.readouterr().out
    assert "Pf5 = " in out
    for n in range(1, 6):
        assert f"specialization a=0,b=1 Pf{n}: matches" in out
    assert "relation Pf5:" in out and "relation Pf4:" in out
