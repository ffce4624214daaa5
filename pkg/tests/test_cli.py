import io
import math

import pytest

from qhistories import cli


def _run(argv):
    buf = io.StringIO()
    import contextlib
    with contextlib.redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


def test_fmt_and_parse_token_roundtrip():
    for v in (0.123456789012, 3, True, False, "label", 1e-300, -2.5e17):
        assert cli._parse_token(cli.fmt(v)) == v
    # floats survive to 12 significant digits
    assert cli._parse_token(cli.fmt(0.1234567890123)) \
        == pytest.approx(0.1234567890123, rel=1e-12)


def test_emit_parse_roundtrip():
    buf = io.StringIO()
    meta = {"n": 4, "eps": 0.05, "tag": "demo"}
    rows = [[1, 0.5, "a"], [2, 0.25, "b"]]
    cli.emit_records(buf, "sample", meta, ["i", "p", "name"], rows)
    title, got_meta, cols, got_rows = cli.parse_records(buf.getvalue())
    assert title == "sample"
    assert got_meta == meta
    assert cols == ["i", "p", "name"]
    assert got_rows == rows


def test_bounds_command():
    code, out = _run(["bounds", "--d-max", "6"])
    assert code == 0
    title, meta, cols, rows = cli.parse_records(out)
    assert title == "bounds"
    assert cols == ["d", "eps", "upper", "lower"]
    for d, eps, upper, lower in rows:
        assert upper == 2 * d + 1
        assert lower <= upper


def test_zeno_command():
    code, out = _run(["zeno", "--n", "100", "--theta", "1.0"])
    assert code == 0
    _, _, _, rows = cli.parse_records(out)
    assert [r[0] for r in rows] == ["X", "Y", "offdiag"]


def test_dheg_command():
    code, out = _run(["dheg", "--n", "3", "--eps", "0.1"])
    assert code == 0
    _, meta, _, rows = cli.parse_records(out)
    vals = dict((r[0], r[1]) for r in rows)
    assert vals["mpv_exact"] == pytest.approx(vals["mpv_closed_form"],
                                              abs=1e-10)


def test_spin_commands():
    code, out = _run(["spin", "classify", "--n", "2", "--seed", "3"])
    assert code == 0
    _, meta, _, _ = cli.parse_records(out)
    assert meta["worst"] < 1e-8

    code, out = _run(["spin", "probs", "--n", "3", "--seed", "3"])
    assert code == 0
    _, meta, _, rows = cli.parse_records(out)
    assert meta["max_abs_diff"] < 1e-9
    assert abs(sum(r[1] for r in rows) - 1.0) < 1e-9

    code, out = _run(["spin", "maxinfo", "--n", "3", "--seed", "3"])
    assert code == 0

    code, out = _run(["spin", "montecarlo", "--n", "3", "--samples", "20000",
                      "--seed", "0"])
    assert code == 0
    _, _, _, rows = cli.parse_records(out)
    assert abs(rows[0][1] - 0.857) < 0.02


def test_spin_recoherence_command():
    code, out = _run(["spin", "recoherence"])
    assert code == 0
    _, meta, _, rows = cli.parse_records(out)
    assert meta["return_distance"] < 1e-10
    assert meta["latest_event"] <= math.pi + 1e-6


def test_random_commands():
    code, out = _run(["random", "run", "--tmax", "1.0", "--seed", "5"])
    assert code == 0
    title, meta, cols, rows = cli.parse_records(out)
    assert meta["termination"] in ("t_max", "max_steps", "max_histories")

    code, out = _run(["random", "analyse", "--tmax", "1.0", "--seed", "5"])
    assert code == 0
    _, _, _, rows = cli.parse_records(out)
    vals = dict((r[0], r[1]) for r in rows)
    assert vals["integrity"] is True


def test_dist_check_command():
    code, out = _run(["dist", "check", "--samples", "5000"])
    assert code == 0
    _, _, _, rows = cli.parse_records(out)
    for law, ks, crit in rows:
        assert ks < crit


def test_selftest_command():
    code, out = _run(["selftest"])
    assert code == 0
    _, _, _, rows = cli.parse_records(out)
    assert all(r[1] is True for r in rows)


def test_out_file_and_config(tmp_path):
    conf = tmp_path / "run.ini"
    conf.write_text("[dheg]\nn = 5\neps = 0.1\n")
    outfile = tmp_path / "records.txt"
    code = cli.main(["--config", str(conf), "--out", str(outfile), "dheg"])
    assert code == 0
    title, meta, _, _ = cli.parse_records(outfile.read_text())
    assert meta["n"] == 5
    assert meta["eps"] == 0.1
    # explicit flags beat the config file
    code = cli.main(["--config", str(conf), "--out", str(outfile),
                     "dheg", "--n", "2"])
    assert code == 0
    _, meta, _, _ = cli.parse_records(outfile.read_text())
    assert meta["n"] == 2


def test_config_unknown_key(tmp_path):
    conf = tmp_path / "bad.ini"
    conf.write_text("[dheg]\nbogus = 1\n")
    with pytest.raises(ValueError, match="bogus"):
        cli.main(["--config", str(conf), "dheg"])
