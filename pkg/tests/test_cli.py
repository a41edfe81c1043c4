import json
import os

import pytest

from freezeshift.cli import main
from freezeshift.specio import (
    dumps_canonical,
    load_spec,
    save_spec,
    spec_from_dict,
    spec_to_dict,
)

from conftest import golden_mean, hard_squares, single_point, thue_morse


@pytest.fixture
def golden_file(tmp_path):
    path = tmp_path / "golden.json"
    save_spec(golden_mean(), path)
    return str(path)


@pytest.fixture
def sp_one_file(tmp_path):
    path = tmp_path / "sp.json"
    save_spec(single_point(sided="one"), path)
    return str(path)


# -- specio ---------------------------------------------------------------------

def test_spec_roundtrip_all_kinds(tmp_path):
    for spec in (golden_mean(), single_point(), thue_morse(), hard_squares()):
        path = tmp_path / "s.json"
        save_spec(spec, path)
        back = load_spec(path)
        assert spec_to_dict(back) == spec_to_dict(spec)
        # canonical emitter: re-emission is byte-identical
        text1 = path.read_text()
        save_spec(back, path)
        assert path.read_text() == text1


def test_spec_from_dict_rejects_garbage():
    from freezeshift.errors import InputError
    with pytest.raises(InputError):
        spec_from_dict({"alphabet": ["0", "0"], "dimension": 1,
                        "kind": {"type": "single", "symbol": "0"}})
    with pytest.raises(InputError):
        spec_from_dict({"alphabet": ["0"], "dimension": 1,
                        "kind": {"type": "mystery"}})


# -- CLI ---------------------------------------------------------------------------

def test_cli_spec_validate(golden_file, capsys):
    rc = main(["spec", "validate", golden_file])
    assert rc == 0
    out = capsys.readouterr().out
    assert json.loads(out)["dimension"] == 1


def test_cli_unknown_subcommand():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


def test_cli_missing_file(tmp_path, capsys):
    rc = main(["entropy", "--spec", str(tmp_path / "nope.json"),
               "--n-max", "3", "--out", str(tmp_path)])
    assert rc == 2


def test_cli_lang_count(golden_file, tmp_path, capsys):
    out = str(tmp_path / "run")
    rc = main(["lang", "count", "--spec", golden_file, "--n", "4", "--out", out])
    assert rc == 0
    assert capsys.readouterr().out.splitlines() == ["1,2", "2,3", "3,5", "4,8"]
    rows = open(os.path.join(out, "counts.csv")).read().splitlines()
    assert rows[1] == "1,2,transfer-1d"
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert manifest["command"] == "lang count"
    assert len(manifest["outputs"]) == 1


def test_cli_entropy(golden_file, tmp_path):
    out = str(tmp_path / "run")
    rc = main(["entropy", "--spec", golden_file, "--n-max", "6", "--out", out])
    assert rc == 0
    doc = json.load(open(os.path.join(out, "entropy.json")))
    assert doc["exact"] == pytest.approx(0.481211825, abs=1e-8)


def test_cli_potential_build(golden_file, tmp_path):
    out = str(tmp_path / "run")
    rc = main(["potential", "build", "--spec", golden_file, "--recipe", "thm34",
               "--i-max", "3", "--table-to", "32", "--out", out])
    assert rc == 0
    rows = open(os.path.join(out, "sequence.csv")).read().splitlines()
    assert rows[0] == "j,a_j,range_i,extrapolated"
    assert len(rows) == 34
    meta = json.load(open(os.path.join(out, "sequence.json")))
    assert meta["name"] == "thm34"


def test_cli_pressure_freeze_pipeline(golden_file, tmp_path, capsys):
    out = str(tmp_path / "run")
    rc = main(["pressure", "curve", "--spec", golden_file, "--recipe", "thm34",
               "--R", "10", "--i-max", "4",
               "--beta-grid", "0,0.05,0.1,0.2,0.4,0.7,1,1.5,2,3,4,6,8",
               "--out", out])
    assert rc == 0
    rc = main(["freeze", "detect", "--curve", os.path.join(out, "curve.csv"),
               "--out", out])
    assert rc == 0
    doc = json.load(open(os.path.join(out, "freeze.json")))
    assert doc["verdict"] == "FrozenBeyond"
    lo, hi = doc["beta_c_interval"]
    assert 0 < lo and hi <= 1 + 2.1  # within one grid step past 1


def test_cli_nogo(capsys, tmp_path):
    out = str(tmp_path / "run")
    rc = main(["nogo", "--sequence", "1/n^2", "--d", "1", "--out", out])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "NoGo"
    doc = json.load(open(os.path.join(out, "nogo.json")))
    assert doc["verdict"] == "NoGo"
    assert "100" in doc["partial_sums"]


def test_cli_tile(tmp_path, capsys):
    spec_path = tmp_path / "sp2.json"
    save_spec(single_point(), spec_path)
    out = str(tmp_path / "run")
    rc = main(["tile", "--spec", str(spec_path), "--window", "16",
               "--seed", "3", "--depth", "5", "--out", out])
    assert rc == 0
    doc = json.loads(open(os.path.join(out, "tiling.json")).read())
    assert "tiles" in doc


def test_cli_pins(sp_one_file, tmp_path, capsys):
    out = str(tmp_path / "run")
    rc = main(["pins", "--spec", sp_one_file, "--word", "10001", "--out", out])
    assert rc == 0
    doc = json.loads(open(os.path.join(out, "pins.json")).read())
    assert doc["pins"] == [0, 1, 3, 4]


def test_cli_sample_deterministic(golden_file, tmp_path, capsys):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["sample", "--spec", golden_file, "--window", "12",
                 "--seed", "7", "--out", out1]) == 0
    assert main(["sample", "--spec", golden_file, "--window", "12",
                 "--seed", "7", "--out", out2]) == 0
    m1 = json.load(open(os.path.join(out1, "manifest.json")))
    m2 = json.load(open(os.path.join(out2, "manifest.json")))
    assert m1["outputs"] == m2["outputs"]  # identical checksums per seed


def test_cli_gibbs_weights(golden_file, tmp_path, capsys):
    out = str(tmp_path / "run")
    rc = main(["gibbs", "weights", "--spec", golden_file, "--recipe", "thm34",
               "--i-max", "3", "--n-max", "2", "--box-len", "3",
               "--beta", "1.0", "--out", out])
    assert rc == 0
    doc = json.load(open(os.path.join(out, "weights.json")))
    assert len(doc["weights"]) == 8
    assert abs(sum(doc["weights"].values()) - 1.0) < 1e-9


def test_cli_gibbs_sample(tmp_path, capsys):
    spec_path = tmp_path / "hs.json"
    save_spec(hard_squares(), spec_path)
    out = str(tmp_path / "run")
    rc = main(["gibbs", "sample", "--spec", str(spec_path), "--recipe", "thm34",
               "--i-max", "2", "--R", "1", "--beta", "3.0", "--n-torus", "8",
               "--steps", "20000", "--burn-in", "2000", "--seed", "4",
               "--out", out])
    assert rc == 0
    doc = json.load(open(os.path.join(out, "chain.json")))
    assert doc["rng"] == "philox4x64"
    assert 0.0 <= doc["inadmissible_mass"] <= 1.0


def test_cli_resource_guard_exit(golden_file, tmp_path):
    rc = main(["pressure", "curve", "--spec", golden_file, "--recipe", "thm34",
               "--R", "40", "--beta-grid", "1", "--out", str(tmp_path)])
    assert rc == 3
