import pytest

from defexp.cli import EXIT_CHECK, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, main, sign_matrix_pgm
from defexp.exactnum import IntPoly
from defexp.expansion import PolyTable
from defexp.tableio import TableFormatError, format_table, load_tables, parse_table, write_tables

from reference_tables import P_TABLE, PHAT_TABLE


def test_round_trip(table10, tmp_path):
    write_tables(table10, tmp_path)
    back = load_tables(tmp_path)
    assert back.P == table10.P and back.Phat == table10.Phat
    assert back.nmax == 10


def test_format_of_first_records(table10):
    text = format_table("P", table10.P, 3)
    assert text.splitlines() == [
        "defexp-table v1 kind=P nmax=3",
        "n=1 deg=0 Mn=2",
        "1",
        "n=2 deg=2 Mn=4",
        "-1 0 3",
        "n=3 deg=5 Mn=7",
        "4 6 -4 -7 8 4",
    ]


def test_parse_rejects_damaged_tables(table10):
    good = format_table("P", table10.P, 3)
    parse_table(good)
    with pytest.raises(TableFormatError):
        parse_table("nonsense\n")
    with pytest.raises(TableFormatError):
        parse_table(good.replace("n=2 deg=2 Mn=4", "n=2 deg=2 Mn=5"))
    with pytest.raises(TableFormatError):
        parse_table(good.replace("-1 0 3", "-1 0 3 7"))
    with pytest.raises(TableFormatError):
        parse_table(good.replace("-1 0 3", "-1 x 3"))
    with pytest.raises(TableFormatError):
        parse_table("\n".join(good.splitlines()[:-1]))


def test_missing_tables_name_the_compute_step(tmp_path):
    with pytest.raises(FileNotFoundError, match="defexp compute"):
        load_tables(tmp_path)


def test_tampered_q_table_detected(table10, tmp_path):
    write_tables(table10, tmp_path)
    q = tmp_path / "Q.txt"
    q.write_text(q.read_text().replace("n=1 deg=2 Mn=2\n0 1 1", "n=1 deg=2 Mn=2\n0 1 2"))
    with pytest.raises(TableFormatError):
        load_tables(tmp_path)


def test_run_config_validation():
    RunConfig().validate()
    for bad in (dict(nmax=0), dict(precisionDigits=20), dict(nmax=5, oracleCheckDepth=6), dict(threads=0)):
        with pytest.raises(UsageError):
            RunConfig(**bad).validate()


def test_compute_reproduces_reference_and_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["compute", "--nmax", "10", "--out", str(a), "--oracle-depth", "6"]) == EXIT_OK
    assert "oracle_match=yes" in capsys.readouterr().out
    assert main(["compute", "--nmax", "10", "--out", str(b)]) == EXIT_OK
    for name in ("P.txt", "PHAT.txt", "Q.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    pt = load_tables(a)
    assert all(list(pt.P[n].coeffs) == P_TABLE[n] for n in range(1, 11))
    assert all(list(pt.Phat[n].coeffs) == PHAT_TABLE[n] for n in range(1, 11))
    # rerun over the same directory
    before = (a / "P.txt").read_bytes()
    assert main(["compute", "--nmax", "10", "--out", str(a)]) == EXIT_OK
    assert (a / "P.txt").read_bytes() == before


def test_compute_nmax_one(tmp_path):
    assert main(["compute", "--nmax", "1", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "P.txt").read_text() == "defexp-table v1 kind=P nmax=1\nn=1 deg=0 Mn=2\n1\n"


def test_out_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DEFEXP_OUT", str(tmp_path))
    assert main(["compute", "--nmax", "2"]) == EXIT_OK
    assert (tmp_path / "PHAT.txt").is_file()
    monkeypatch.delenv("DEFEXP_OUT")
    assert main(["compute", "--nmax", "2"]) == EXIT_USAGE


def test_verify_passes_and_flags_counterexample(table10, tmp_path, capsys):
    write_tables(table10, tmp_path)
    assert main(["verify", "--tables", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "status=ok" in out and "nonneg=no" not in out
    # a table with P_3 replaced by something negative at k = 1
    bad = list(table10.P)
    bad[3] = IntPoly([-100, 0, 0, 0, 0, 4])
    write_tables(PolyTable(10, bad, table10.Phat), tmp_path / "bad")
    assert main(["verify", "--tables", str(tmp_path / "bad")]) == EXIT_CHECK
    out = capsys.readouterr().out
    assert "COUNTEREXAMPLE n=3 kind=P k=1 value=-96" in out


def test_verify_threads_do_not_change_output(table10, tmp_path, capsys):
    write_tables(table10, tmp_path)
    main(["verify", "--tables", str(tmp_path)])
    one = capsys.readouterr().out
    main(["verify", "--tables", str(tmp_path), "--threads", "3"])
    assert capsys.readouterr().out == one


def test_roots_command(table10, tmp_path, capsys):
    write_tables(table10, tmp_path)
    assert main(["roots", "--tables", str(tmp_path), "--n", "2", "--n", "6", "--kind", "PHAT"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("n=2 kind=PHAT count=0")
    assert lines[1].startswith("n=6 kind=PHAT count=2") and "negative_at=" in lines[1]
    assert main(["roots", "--tables", str(tmp_path), "--n", "11"]) == EXIT_USAGE


def test_signs_command(table10, tmp_path, capsys):
    write_tables(table10, tmp_path)
    assert main(["signs", "--tables", str(tmp_path), "--kind", "P"]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert rows[:2] == ["+", "-0+"]
    pgm = tmp_path / "s.pgm"
    assert main(["signs", "--tables", str(tmp_path), "--format", "pgm", "--shift", "1", "--out", str(pgm)]) == EXIT_OK
    data = pgm.read_bytes()
    header, body = data.split(b"\n255\n", 1)
    w, h = map(int, header.split(b"\n")[1].split())
    assert h == 10 and len(body) == w * h
    assert body[:w] == bytes([255] + [128] * (w - 1))
    capsys.readouterr()
    assert main(["signs", "--tables", str(tmp_path), "--format", "csv"]) == EXIT_OK
    csv = capsys.readouterr().out.splitlines()
    assert csv[0].startswith("n,c0,c1,c2")
    assert csv[1:3] == ["1,1", "2,1,,1"]
    assert main(["signs", "--tables", str(tmp_path), "--format", "pgm"]) == EXIT_USAGE


def test_pgm_encoding():
    data = sign_matrix_pgm(["+", "-0"])
    assert data == b"P5\n2 2\n255\n" + bytes([255, 128, 0, 128])


def test_numeric_commands(capsys):
    assert main(["zeros", "--q", "0.1", "--k", "2", "--prec", "30"]) == EXIT_OK
    assert "k=2 x=-20.39967687" in capsys.readouterr().out
    assert main(["zeros", "--q", "0.3"]) == EXIT_USAGE
    assert main(["zeros", "--q", "0.1", "--prec", "10"]) == EXIT_USAGE
    assert main(["cbar", "--q", "0.1", "--nmax", "3", "--J", "25", "--prec", "40", "--jacobi", "10"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "jacobi_through=10 ok" in out and out.rstrip().endswith("status=ok")
    assert main(["sokal-check"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("below_two=yes") == 5 and out.count("prefix_match=yes") == 3


def test_identity_check_command(capsys):
    assert main(["zeros", "--q", "0.1", "--k", "1", "--prec", "30", "--check-identities", "--J", "20"]) == EXIT_OK
    assert "status=ok" in capsys.readouterr().out


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compute"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == EXIT_USAGE
    assert main(["verify", "--tables", "/nonexistent/dir"]) == EXIT_USAGE
    assert main(["verify", "--tables", "/tmp", "--rgrid", "a,b"]) == EXIT_USAGE
