import json
import re

import pytest

from src.cli.main import main, parse_taus
from src.utils.errors import UsageError


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.splitlines(), captured.err


def test_parse_taus():
    assert parse_taus("3,0,0") == [3, 0, 0]
    assert parse_taus("") == []
    with pytest.raises(UsageError):
        parse_taus("3,x")


def test_corr_all_engines(capsys):
    code, lines, _ = run(capsys, "corr", "--g", "1", "--kappas", "1:1", "--taus", "0", "--engine", "all")
    assert code == 0
    assert lines == ["1/24"] * 4


def test_corr_single_engine(capsys):
    code, lines, _ = run(capsys, "corr", "--g", "0", "--kappas", "-", "--taus", "0,0,0", "--engine", "alpha")
    assert code == 0
    assert lines == ["1"]


def test_corr_tsv_skips_ms_for_higher_kappa(capsys):
    code, lines, _ = run(capsys, "--format", "tsv", "corr", "--g", "2", "--kappas", "3:1", "--taus")
    assert code == 0
    assert lines == ["kmz_dvv\t1/1152", "alpha\t1/1152", "inverted\t1/1152"]


def test_corr_json(capsys):
    code, lines, _ = run(capsys, "--format", "json", "corr", "--g", "1", "--taus", "1", "--engine", "kmz_dvv")
    assert code == 0
    payload = json.loads("\n".join(lines))
    assert payload == [{"engine": "kmz_dvv", "genus": 1, "kappa": "-", "taus": [1], "value": "1/24"}]


def test_global_flags_after_the_command(capsys, tmp_path):
    code, lines, _ = run(capsys, "corr", "--g", "1", "--taus", "1", "--engine", "kmz_dvv", "--format", "json")
    assert code == 0
    assert json.loads("\n".join(lines))[0]["value"] == "1/24"

    cache = tmp_path / "late.cache"
    code, lines, _ = run(capsys, "beta", "--max", "2", "--format", "tsv", "--cache", str(cache), "--log-level", "ERROR")
    assert code == 0
    assert len(lines) == 3
    assert cache.exists()


@pytest.mark.parametrize(
    "argv,exit_code",
    [
        (["corr", "--g", "1", "--kappas", "-", "--taus"], 2),
        (["corr", "--g", "1", "--kappas", "1:x", "--taus", "0"], 1),
        (["corr", "--g", "1", "--taus", "0", "--engine", "nope"], 1),
        (["corr", "--g", "2", "--kappas", "3:1", "--engine", "ms_kappa1"], 5),
        (["volume", "--g", "0", "--n", "2"], 2),
        (["bogus"], 1),
    ],
)
def test_exit_codes(capsys, argv, exit_code):
    code, _, err = run(capsys, *argv)
    assert code == exit_code
    assert "error:" in err


def test_volume_plain(capsys):
    code, lines, _ = run(capsys, "volume", "--g", "0", "--n", "4")
    assert code == 0
    assert lines[0] == "2 * pi^2"
    assert "1/2 * L1^2" in lines
    assert len(lines) == 5


def test_volume_tsv(capsys):
    code, lines, _ = run(capsys, "--format", "tsv", "volume", "--g", "1", "--n", "1")
    assert code == 0
    assert lines == ["0\t1/12\t2", "1\t1/48\t0"]


def test_alpha_table(capsys):
    code, lines, _ = run(capsys, "alpha", "--max-weight", "2")
    assert code == 0
    assert lines == ["-\t1", "1:1\t1/3", "1:2\t7/45", "2:1\t1/15"]


def test_beta_table(capsys):
    code, lines, _ = run(capsys, "beta", "--max", "2")
    assert code == 0
    assert lines == ["0\t1\t1\tok", "1\t1/3\t1/3\tok", "2\t7/90\t7/90\tok"]


def test_positivity(capsys):
    code, lines, _ = run(capsys, "positivity", "--series", "recursion-kernel", "--max-weight", "3")
    assert code == 0
    assert lines[-1] == "SERIES recursion-kernel weight<=3 ALL-POSITIVE"


def test_verify_iz_suite(capsys, monkeypatch):
    monkeypatch.setenv("KAPPA_PSI_VERIFY_IZ_G_MAX", "3")
    code, lines, _ = run(capsys, "verify", "--suite", "iz")
    assert code == 0
    assert lines == ["CHECK itzykson-zuber g<=3 PASS checked=3 skipped=0"]


def test_cache_round_trip(capsys, tmp_path):
    cache = str(tmp_path / "cli.cache")
    argv = ["--cache", cache, "corr", "--g", "2", "--kappas", "1:1,2:1"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == second[0] == 0
    assert first[1] == second[1] == ["1/240"] * 3
    assert (tmp_path / "cli.cache").read_text().startswith("kappa-psi-cache v1\n")


def cache_counters(err, engine):
    match = re.findall(rf"{engine}: entries=(\d+) hits=(\d+) misses=(\d+)", err)
    return tuple(int(n) for n in match[-1])


def test_cached_run_has_no_misses(capsys, tmp_path):
    cache = str(tmp_path / "kmz.cache")
    argv = ["--cache", cache, "corr", "--g", "2", "--kappas", "1:1,2:1", "--taus", "1", "--engine", "kmz_dvv"]
    code, lines, err = run(capsys, *argv)
    assert code == 0
    _, _, first_misses = cache_counters(err, "kmz_dvv")
    assert first_misses > 0

    code, again, err = run(capsys, *argv)
    assert code == 0
    assert again == lines
    entries, hits, misses = cache_counters(err, "kmz_dvv")
    assert misses == 0
    assert hits == 1
    assert entries > 1


def test_tampered_cache_record_is_caught(capsys, tmp_path):
    path = tmp_path / "tampered.cache"
    path.write_text("kappa-psi-cache v1\ng=2;k=1:1,2:1;t=;v=1/239\n")
    code, lines, err = run(capsys, "--cache", str(path), "corr", "--g", "2", "--kappas", "1:1,2:1")
    assert code == 3
    assert lines == ["1/239", "1/240", "1/240"]
    assert "engines disagree" in err
    assert "v=1/239" not in path.read_text()


def test_tampered_initial_value_is_corruption(capsys, tmp_path):
    path = tmp_path / "initial.cache"
    path.write_text("kappa-psi-cache v1\ng=1;k=1:1;t=0;v=1/23\n")
    code, lines, _ = run(capsys, "--cache", str(path), "corr", "--g", "1", "--kappas", "1:1", "--taus", "0")
    assert code == 4
    assert lines == []
