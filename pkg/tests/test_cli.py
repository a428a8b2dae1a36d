import json

import numpy as np
import pytest

from fracinf import catalog
from fracinf.cli import ConfigError, main, parse_config
from fracinf.field import read_grid_csv


def test_defaults_valid():
    cfg = parse_config()
    assert cfg.command == "evolve" and cfg.s == 0.75


@pytest.mark.parametrize("over,msg", [({"s": 0.4}, "s must lie in (1/2,1)"), ({"theta": 1.5}, "CFL"),
                                      ({"datum": "nope"}, "unknown datum"), ({"suite": "nope"}, "unknown suite")])
def test_rejections(over, msg):
    with pytest.raises(ConfigError, match=msg.replace("(", r"\(").replace(")", r"\)")):
        parse_config(overrides=over)


def test_unknown_key_has_location(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[scheme]\ntheta = 0.5\nwrong = 1\n")
    with pytest.raises(ConfigError, match=r"\[scheme\]\.wrong"):
        parse_config(p)
    p.write_text("[nosuch]\na = 1\n")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(p)


def test_flags_override_file(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[problem]\ns = 0.6\ndatum = gaussian\ndatum.sigma = 2\n[operator]\neps = 0.2\n")
    cfg = parse_config(p, {"s": 0.9})
    assert cfg.s == 0.9 and cfg.eps == 0.2 and cfg.datum_params == {"sigma": 2.0}


def test_kernel_command(tmp_path):
    assert main(["kernel", "--s", "0.75", "--out", str(tmp_path)]) == 0
    tab = np.loadtxt(tmp_path / "kernel_profile.csv", delimiter=",", skiprows=1)
    assert np.all(np.diff(tab[:, 1]) < 0)
    meta = json.loads((tmp_path / "run.json").read_text())
    assert meta["passed"] and "versions" in meta and "tolerances" in meta


def test_evolve_T0_is_datum(tmp_path):
    assert main(["evolve", "--T", "0", "--out", str(tmp_path)]) == 0
    snaps = sorted(tmp_path.glob("snapshot_*.csv"))
    assert len(snaps) == 1
    u = read_grid_csv(snaps[0])
    assert np.array_equal(u.values, catalog.gaussian(2)(u.spec.mesh()))


def test_evolve_deterministic(tmp_path):
    args = ["evolve", "--T", "0.05", "--eps", "0.2"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "snapshot_t0.05.csv").read_bytes()
    assert a == (tmp_path / "b" / "snapshot_t0.05.csv").read_bytes()


def test_op_eval(tmp_path):
    assert main(["op-eval", "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "run.json").read_text())["result"]["values"]
    assert rows[0]["ifl"] == pytest.approx(-1.4464090846320771, abs=1e-6)


def test_exit_codes(tmp_path, capsys):
    assert main(["evolve", "--s", "0.4", "--out", str(tmp_path)]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["exit_code"] == 2 and "s must lie" in err["message"]
    assert main(["bogus-command"]) == 2
    assert main(["evolve", "--config", str(tmp_path / "missing.ini")]) == 2


def test_numerical_abort_exit_code(tmp_path, monkeypatch):
    from fracinf import cli
    from fracinf.scheme import NumericalAbort

    def boom(*a, **k):
        raise NumericalAbort("non-finite value")

    monkeypatch.setattr(cli, "evolve", boom)
    assert main(["evolve", "--out", str(tmp_path)]) == 3
