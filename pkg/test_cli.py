"""End-to-end tests of the command line, run in-process."""

import pytest

from cli import EXIT_BUDGET, EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from config import settings

CATALOG_IDS = [
    "gf25-a", "gf25-b", "gf27-a", "gf27-b", "z37-g", "z47", "gf49", "z61",
    "spence63", "z127-family", "z127-4block",
]

Z5_SDS = "group cyclic:5\ntype ssss\nblock 1 4\nblock 2 3\nblock 0\nblock 0\n"


@pytest.fixture
def z5_file(tmp_path):
    path = tmp_path / "z5.sds"
    path.write_text(Z5_SDS)
    return path


def test_verify_file(z5_file, capsys):
    assert main(["verify", str(z5_file)]) == EXIT_OK
    out = capsys.readouterr().out
    assert f"PASS  {z5_file}  (5;2,2,1,1;1) ssss eq1=true eq3=true" in out
    assert "verify: 1/1 passed" in out


def test_verify_non_sds(tmp_path, capsys):
    path = tmp_path / "bad.sds"
    path.write_text("group cyclic:5\nblock 1 4\nblock 1 4\nblock 0\nblock 0\n")
    assert main(["verify", str(path)]) == EXIT_FAILURE
    assert "not an SDS at element 2" in capsys.readouterr().out


def test_verify_declared_type_mismatch(tmp_path, capsys):
    path = tmp_path / "typed.sds"
    path.write_text(Z5_SDS.replace("type ssss", "type kkss"))
    assert main(["verify", str(path)]) == EXIT_FAILURE
    assert "declared type kkss does not hold" in capsys.readouterr().out


def test_verify_difference_family_flag(tmp_path):
    path = tmp_path / "df.sds"
    path.write_text("group cyclic:7\nblock 1 2 4\nblock 0\nblock 0\nblock 0\n")
    assert main(["verify", str(path)]) == EXIT_FAILURE
    assert main(["verify", "--difference-family", str(path)]) == EXIT_OK


def test_verify_malformed_file(tmp_path, capsys):
    path = tmp_path / "broken.sds"
    path.write_text("group cyclic:5\nblock 9\n")
    assert main(["verify", str(path)]) == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_verify_catalog_entry(capsys):
    assert main(["verify", "--entry", "z37-g"]) == EXIT_OK
    assert "(37;18,18,16,13;28) kkss" in capsys.readouterr().out


def test_unknown_entry():
    assert main(["verify", "--entry", "z999"]) == EXIT_USAGE


def test_export_then_verify(tmp_path, capsys):
    out = tmp_path / "z47.sds"
    assert main(["catalog", "export", "z47", "-o", str(out)]) == EXIT_OK
    assert out.read_text().startswith("group cyclic:47\ntype ks**\n")
    assert main(["verify", str(out)]) == EXIT_OK
    assert "(47;23,21,19,19;35) ks**" in capsys.readouterr().out


@pytest.mark.parametrize("entry_id", CATALOG_IDS)
def test_every_exported_entry_verifies(entry_id, tmp_path, capsys):
    out = tmp_path / f"{entry_id}.sds"
    assert main(["catalog", "export", entry_id, "-o", str(out)]) == EXIT_OK
    capsys.readouterr()
    assert main(["verify", str(out)]) == EXIT_OK
    assert "verify: 1/1 passed" in capsys.readouterr().out


def test_three_block_family_verifies_as_difference_family(tmp_path, capsys):
    out = tmp_path / "z127.sds"
    assert main(["catalog", "export", "z127-family", "-o", str(out)]) == EXIT_OK
    capsys.readouterr()
    assert main(["verify", str(out)]) == EXIT_OK
    assert "(127;57,57,57;76) s**" in capsys.readouterr().out
    assert main(["verify", "--difference-family", str(out)]) == EXIT_OK


def test_export_to_stdout(capsys):
    assert main(["catalog", "export", "gf25-a"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("group ea:5^2:2,0,1\ntype ssss\n")


def test_export_needs_target():
    assert main(["catalog", "export"]) == EXIT_USAGE


def test_construct_and_check_matrix(tmp_path, capsys):
    out = tmp_path / "h148.txt"
    assert main(["construct", "--entry", "z37-g", "-o", str(out)]) == EXIT_OK
    assert "order 148 hadamard=true skew_type=true type1=true" in capsys.readouterr().out
    assert out.read_text().startswith("hadamard 148\n")

    assert main(["check-matrix", str(out)]) == EXIT_OK
    assert "hadamard=true skew_type=true" in capsys.readouterr().out


def test_seed_flag_leaves_settings_untouched(tmp_path):
    before = settings.sample_seed
    out = tmp_path / "h.txt"
    assert main(["--seed", str(before + 1), "construct", "--entry", "z37-g", "-o", str(out)]) == EXIT_OK
    assert settings.sample_seed == before


def test_construct_rejects_non_sds(tmp_path, capsys):
    path = tmp_path / "bad.sds"
    path.write_text("group cyclic:5\nblock 1 4\nblock 1 4\nblock 0\nblock 0\n")
    out = tmp_path / "h.txt"
    assert main(["construct", str(path), "-o", str(out)]) == EXIT_FAILURE
    assert not out.exists()
    assert "FAIL" in capsys.readouterr().out


def test_check_matrix_detects_broken_file(tmp_path, capsys):
    path = tmp_path / "h.txt"
    path.write_text("hadamard 2\n++\n++\n")
    assert main(["check-matrix", str(path)]) == EXIT_FAILURE
    assert "hadamard=false" in capsys.readouterr().out


def test_catalog_list(capsys):
    assert main(["catalog", "list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "spence63 (63;31,31,27,25;51) kkss" in out
    assert "z127-4block (127;63,57,57,57;107) ks**" in out


def test_catalog_list_tsv(capsys):
    assert main(["--tsv", "catalog", "list"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "id\tparams\ttype\tprovenance"
    assert len(lines) == 12


def test_catalog_check_all(capsys):
    assert main(["catalog", "check-all"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "catalog check-all: 12/12 passed" in out
    assert "PASS  spence63-pipeline  period 15624 X(126,124,125,1) Y(126,4,125,31) offset 11" in out


def test_audit_pipeline(tmp_path, capsys):
    assert main(["catalog", "audit-spence63", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "07_family.sds").exists()
    assert "7 stage files" in capsys.readouterr().out


def test_search_incompatible(capsys):
    assert main(["search", "--group", "cyclic:5", "--k", "2,2,1,1", "--type", "kkks"]) == EXIT_OK
    assert capsys.readouterr().out == "cyclic:5 (5;2,2,1,1;1) kkks: incompatible (x)\n"


def test_search_writes_results(tmp_path, capsys):
    argv = ["search", "--group", "cyclic:7", "--k", "3,3,3,1", "--type", "kkks", "--out", str(tmp_path)]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("cyclic:7 (7;3,3,3,1;3) kkks: 2 classes")
    assert len(list(tmp_path.glob("n7_kkks_*.sds"))) == 2


def test_search_budget(capsys):
    argv = ["search", "--group", "cyclic:7", "--k", "3,3,3,1", "--type", "kkks", "--budget", "5"]
    assert main(argv) == EXIT_BUDGET
    assert capsys.readouterr().out.startswith("PARTIAL 0 families")


def test_search_bad_group():
    assert main(["search", "--group", "ea:5^2:4,0,1", "--k", "12,12,9,9", "--type", "ssss"]) == EXIT_USAGE


def test_params(capsys):
    assert main(["params", "--n", "7"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "3,3,3,1" in out and "3,2,2,2" in out


def test_params_tsv_with_series(capsys):
    assert main(["--tsv", "params", "--n", "25"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n\tk\tlambda\ta\tssss\tksss\tkkss\tkkks"
    assert "25\t12,11,11,8\t17\t1,3,3,9\tok\tok\tx\tx" in lines
    assert lines[-1] == "multicirculant series q=5: (25;10,10,10,10;15)"


def test_params_even_order():
    assert main(["params", "--n", "8"]) == EXIT_USAGE


def test_usage_errors():
    assert main([]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["--help"]) == EXIT_OK
