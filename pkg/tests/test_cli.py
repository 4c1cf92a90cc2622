import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from pseudobosons.cli import (
    ConfigError,
    SuiteConfig,
    commutator_report,
    kernel_smoke_test,
    load_config_file,
    main,
    run_suite,
)


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def test_config_parsing_is_exact():
    cfg = SuiteConfig.from_mapping({"omega": "4", "beta": "3/2", "nu": "5/2", "cutoff": "-8"})
    assert cfg.beta == Fraction(3, 2) and cfg.cutoff == -8
    for bad in ({"omega": "0.5"}, {"beta": "2"}, {"nu": "1/2"}, {"n": "4"}, {"color": "red"}, {"format": "xml"}):
        with pytest.raises(ConfigError):
            SuiteConfig.from_mapping(bad)


def test_config_file(tmp_path):
    path = tmp_path / "suite.cfg"
    path.write_text("# comment\nomega = 2\nquad-order = 30\nmodel = qho\n")
    assert load_config_file(str(path)) == {"omega": "2", "quad_order": "30", "model": "qho"}
    path.write_text("no equals sign here\n")
    with pytest.raises(ConfigError):
        load_config_file(str(path))


def test_qho_suite_passes():
    rep = run_suite(SuiteConfig(model="qho", nmax=4))
    assert rep.ok and rep.suite == "qho"


def test_calogero_suite_passes():
    rep = run_suite(SuiteConfig(model="calogero", nmax=3, degmax=8))
    assert rep.ok, rep.failures()


def test_verify_exit_codes(tmp_path):
    code, out = run(["verify", "qho", "--omega", "1", "--beta", "1/2", "--nmax", "2"])
    assert code == 0
    body = json.loads(out)
    assert set(body) == {"suite", "params", "checks", "summary", "version"}
    assert body["summary"]["fail"] == 0
    assert run(["verify", "qho", "--beta", "0.5"])[0] == 2
    assert run(["verify", "calogero", "--nu", "1/3"])[0] == 2
    assert run(["verify", "qho", "--config", str(tmp_path / "missing.cfg")])[0] == 2
    assert run(["frobnicate"])[0] == 2


def test_flags_override_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("omega = 2\nnmax = 1\n")
    code, out = run(["verify", "qho", "--config", str(path), "--omega", "4"])
    params = json.loads(out)["params"]
    assert code == 0 and params["omega"] == "4" and params["nmax"] == 1


def test_markdown_output():
    code, out = run(["verify", "qho", "--nmax", "1", "--format", "markdown"])
    assert code == 0 and out.startswith("# qho") and "| check | status |" in out


def test_apply_command():
    code, out = run(["apply", "exp(-1/4, OL)", "--to", "x1^2 + x2^2"])
    assert code == 0 and json.loads(out)["result"] == "x1^2 + x2^2 - 4"
    code, out = run(["apply", "exp(-1/4, OL)", "--to", "x1^2", "--mode", "truncated", "--cutoff", "-4"])
    body = json.loads(out)
    assert code == 0 and body["truncated"] and list(body["components"]) == ["2", "0", "-2", "-4"]
    assert run(["apply", "x1*(", "--to", "1"])[0] == 2
    assert run(["apply", "exp(-1/4, OL)", "--to", "x1^2", "--max-terms", "3"])[0] == 1


def test_commutators_command():
    code, out = run(["commutators", "--n", "2"])
    body = json.loads(out)
    assert code == 0 and body["summary"]["fail"] == 0
    assert body["summary"]["pass"] == len(commutator_report(2).checks)


def test_kernel_smoke_test():
    checks = kernel_smoke_test(1, 20, [(0.5, -0.5), (1.0, 1.0)])
    assert checks[0].passed and "smoke test only" in checks[0].detail
    assert checks[1].status == "skipped"
    for k in (5, 20):
        assert kernel_smoke_test(1, k, [(0.3, 1.1)])[0].passed
    with pytest.raises(ConfigError):
        kernel_smoke_test(1, 4)
    code, out = run(["kernel", "--point", "0.5,-0.5"])
    assert code == 0 and math.isfinite(float(json.loads(out)["checks"][0]["detail"].split("value ")[1].split(",")[0]))


def test_corrupted_model_fails_with_witness():
    from pseudobosons.calogero import calogero_report

    rep = calogero_report(2, 1, Fraction(3, 2), degmax=4, nmax=2, corrupt_ol=True)
    bad = [c for c in rep.failures() if c.name.startswith("[O_L,O_E]")]
    assert bad and bad[0].witness


def test_json_is_deterministic():
    a = run(["verify", "qho", "--nmax", "2", "--seed", "3"])[1]
    b = run(["verify", "qho", "--nmax", "2", "--seed", "3"])[1]
    assert a == b


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pseudobosons", "apply", "OE", "--to", "x1*x2", "--format", "markdown"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and "2*x1*x2" in proc.stdout
