import pytest

from app.services.corpus import load_corpus
from app.services.errors import CorpusParseError, DanglingReferenceError, SelfCheckError
from app.services.ledger import COVERED_PREFIX, VERDICT_EXTERNAL, ledger_service


def _edit(path, old, new):
    text = path.read_text(encoding="utf-8")
    assert old in text
    path.write_text(text.replace(old, new, 1), encoding="utf-8")


def _line(path, needle):
    lines = path.read_text(encoding="utf-8").splitlines()
    return next(n for n, line in enumerate(lines, start=1) if line.startswith(needle))


def test_shipped_corpus_counts(corpus):
    assert corpus.families == ["2.22", "3.12", "3.13", "4.13"]
    assert len(corpus.geometries) == 12
    assert len(corpus.surfaces) == 9
    assert len(corpus.certificates) == 32
    assert [e.family for e in corpus.externals] == ["2.24", "2.25"]


def test_empty_directory_is_an_empty_corpus(tmp_path):
    corpus = load_corpus(tmp_path)
    assert corpus.certificates == []
    assert corpus.families == []


def test_missing_root(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus(tmp_path / "missing")


def test_edited_triple_fails_cube_self_check(corpus_copy):
    _edit(corpus_copy / "2.22" / "geometry" / "P3.toml", '["H", "H", "H", 1]', '["H", "H", "H", 2]')
    with pytest.raises(SelfCheckError, match="P3"):
        load_corpus(corpus_copy)


def test_printed_triple_is_checked(corpus_copy):
    _edit(corpus_copy / "2.22" / "geometry" / "Xtilde.toml", '["E", "E", "E", -4]', '["E", "E", "E", -6]')
    with pytest.raises(SelfCheckError, match="Xtilde"):
        load_corpus(corpus_copy)


def test_float_is_rejected_with_line(corpus_copy):
    path = corpus_copy / "2.22" / "certs" / "div_Qtilde.toml"
    _edit(path, "tau = 2\n", "tau = 2.0\n")
    with pytest.raises(CorpusParseError) as info:
        load_corpus(corpus_copy)
    assert info.value.path == str(path)
    assert info.value.line == _line(path, "tau")


def test_unknown_field_is_rejected(corpus_copy):
    path = corpus_copy / "2.22" / "certs" / "flag_l.toml"
    _edit(path, "expected_S_curve = 1\n", "expected_S_curve = 1\nexpected_delta = 1\n")
    with pytest.raises(CorpusParseError) as info:
        load_corpus(corpus_copy)
    assert info.value.line == _line(path, "expected_delta")


def test_dangling_divisorial_reference(corpus_copy):
    _edit(corpus_copy / "2.22" / "certs" / "flag_l.toml", 'divisorial = "HC"', 'divisorial = "HCx"')
    with pytest.raises(DanglingReferenceError, match="HCx"):
        load_corpus(corpus_copy)


def test_dangling_scope_center(corpus_copy):
    _edit(corpus_copy / "2.22" / "scope.toml", 'covered_by = "point-HC"', 'covered_by = "point-X"')
    with pytest.raises(DanglingReferenceError):
        load_corpus(corpus_copy)


def test_ledgers(corpus):
    ledgers = {ledger.family: ledger for ledger in ledger_service.build(corpus)}
    assert list(ledgers) == ["2.22", "2.24", "2.25", "3.12", "3.13", "4.13"]

    ledger = ledgers["2.22"]
    assert ledger.complete
    assert all(eff.passed for eff in ledger.eff)
    assert [eff.coefficients for eff in ledger.eff] == [[1, 2, 2], [1, 1], None]
    rows = {row.center: row for row in ledger.rows}
    assert rows["l-prime"].verdict == f"{COVERED_PREFIX}point-HC"
    assert rows["Qtilde"].values["beta"] == "17/60"

    assert ledgers["2.24"].rows[0].verdict == VERDICT_EXTERNAL

    unnamed = [row for row in ledgers["3.13"].rows if row.center == "-"]
    assert [(row.certificate, row.verdict) for row in unnamed] == [("ODP-Ga", "beta<=0")]


def test_every_eff_check_passes(corpus):
    assert all(eff.passed for ledger in ledger_service.build(corpus) for eff in ledger.eff)


def test_concurrent_verification_matches_single_worker(corpus):
    single = ledger_service.verify_all(corpus, workers=1)
    pooled = ledger_service.verify_all(corpus, workers=8)
    assert [(r.family, r.certificate) for r in pooled] == [(c.family, c.name) for c in corpus.certificates]
    assert [r.model_dump() for r in pooled] == [r.model_dump() for r in single]
    assert ledger_service.build(corpus, pooled) == ledger_service.build(corpus, single)
