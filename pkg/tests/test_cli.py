import csv
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from virlab import experiments as ex
from virlab.cli import main
from virlab.errors import DescriptorInvalid


def write(tmp_path, data, name="d.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_catalog():
    cat = ex.list_experiments()
    assert len(cat) == 8
    assert set(cat) == {"vir-check", "ch-evolve", "hopf-oracle", "mv-run", "mv-limit",
                        "hs-step", "hs-simple", "invariance-check"}
    for name, entry in cat.items():
        jsonschema.Draft202012Validator.check_schema(entry["schema"])
        jsonschema.validate(entry["defaults"], entry["schema"])
        d = ex.RunDescriptor.from_json({"experiment": name, "payload": entry["defaults"]})
        assert d.payload == entry["defaults"]


def test_list_command(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ex.SCHEMAS:
        assert name in out
    assert main(["list", "--json"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 8


def test_validate(tmp_path, capsys):
    assert main(["validate", write(tmp_path, {"experiment": "mv-run", "seed": 3})]) == 0
    bad = write(tmp_path, {"experiment": "ch-evolve", "payload": {"dt": -1, "extra": 1}})
    assert main(["validate", bad]) == 1
    err = capsys.readouterr().err
    assert "payload/dt" in err and "extra" in err
    assert main(["validate", write(tmp_path, {"experiment": "nope"})]) == 1
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["validate", str(junk)]) == 1
    with pytest.raises(DescriptorInvalid):
        ex.RunDescriptor.from_json([])


def test_field_payload_forms():
    f = ex.field_from_json({"n": 32, "fourier": {"const": 1.0, "cos": [0, 0.5], "sin": [2.0]}})
    x = f.nodes
    assert np.allclose(f.samples, 1 + 0.5 * np.cos(2 * x) + 2 * np.sin(x))
    g = ex.field_from_json(f.to_json())
    assert np.array_equal(g.samples, f.samples)
    with pytest.raises(DescriptorInvalid):
        ex.RunDescriptor.from_json({"experiment": "hopf-oracle",
                                    "payload": {"v0": {"n": 32, "fourier": {}, "samples": []}}})


def test_vir_check_seed_42(tmp_path):
    d = write(tmp_path, {"experiment": "vir-check", "seed": 42, "payload": {"n": 256}})
    assert main(["run", d, "--out", str(tmp_path / "o")]) == 0
    rep = json.loads((tmp_path / "o" / "vir-check.report.json").read_text())
    assert rep["summary"]["cocycle"] < 1e-6 and rep["passed"]
    assert rep["descriptor"]["seed"] == 42
    assert len(read_csv(rep["csv_path"])) == 100


def test_ch_evolve_kdv_csv(tmp_path):
    d = write(tmp_path, {"experiment": "ch-evolve", "payload": {
        "params": {"alpha": 1, "beta": 0, "b": -1},
        "v0": {"n": 256, "fourier": {"sin": [1.0]}},
        "dt": 1e-3, "steps": 1000, "residual_trials": 0}})
    assert main(["run", d, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "ch-evolve.csv")
    assert float(rows[-1]["t"]) == pytest.approx(1.0)
    for key in ("momentum", "energy"):
        vals = np.array([float(r[key]) for r in rows])
        assert np.max(np.abs(vals - vals[0])) < 1e-6


def test_exit_code_on_invariant_failure(tmp_path):
    d = write(tmp_path, {"experiment": "invariance-check",
                         "payload": {"V": "square", "trials": 5}})
    assert main(["run", d, "--out", str(tmp_path)]) == 2


def test_exit_code_on_module_error(tmp_path, capsys):
    d = write(tmp_path, {"experiment": "ch-evolve",
                         "payload": {"params": {"alpha": 0, "beta": 0, "b": 1}}})
    assert main(["run", d, "--out", str(tmp_path)]) == 1
    assert "ch-evolve" in capsys.readouterr().err


def test_seed_override_and_determinism(tmp_path):
    d = write(tmp_path, {"experiment": "vir-check", "seed": 1, "payload": {"trials": 3}})
    main(["run", d, "--out", str(tmp_path / "a")])
    main(["run", d, "--out", str(tmp_path / "b")])
    main(["run", d, "--seed", "2", "--out", str(tmp_path / "c")])
    a, b, c = ((tmp_path / k / "vir-check.csv").read_bytes() for k in "abc")
    assert a == b and a != c
    rep = json.loads((tmp_path / "c" / "vir-check.report.json").read_text())
    assert rep["descriptor"]["seed"] == 2


def test_output_dir_precedence(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    d = write(tmp_path, {"experiment": "invariance-check", "output_dir": "from_desc",
                         "payload": {"trials": 2}})
    monkeypatch.delenv("VIR_LAB_OUT", raising=False)
    main(["run", d])
    assert (tmp_path / "from_desc" / "invariance-check.csv").exists()
    monkeypatch.setenv("VIR_LAB_OUT", str(tmp_path / "from_env"))
    main(["run", d])
    assert (tmp_path / "from_env" / "invariance-check.csv").exists()
    main(["run", d, "--out", str(tmp_path / "from_flag")])
    assert (tmp_path / "from_flag" / "invariance-check.csv").exists()


def test_csv_float_format(tmp_path):
    ex.write_csv(tmp_path / "x.csv", ["a", "b", "c"], [[1, 0.1, None], [2, np.float64(1 / 3), True]])
    assert (tmp_path / "x.csv").read_text() == ("a,b,c\n1,0.10000000000000001,\n"
                                                "2,0.33333333333333331,true\n")


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "virlab.cli", "list"], capture_output=True,
                       text=True, check=True)
    assert "hs-simple" in r.stdout
