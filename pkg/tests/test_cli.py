import json
import math
import shutil
import sys
from pathlib import Path

import pytest

from apollon.cli import main

GOLDEN = Path(__file__).parent / "golden"
sys.path.insert(0, str(Path(__file__).parent.parent / "scripts"))
from make_goldens import CASES  # noqa: E402


@pytest.fixture
def specs(tmp_path, monkeypatch):
    for p in GOLDEN.glob("*.yaml"):
        shutil.copy(p, tmp_path)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]


def test_metric_j_forced_value(specs, capsys):
    code, out, _ = run(capsys, "metric", "j", "--spec", "half_plane.yaml", "--pair", "0,1", f"0,{math.e!r}")
    assert code == 0
    assert out.startswith("# tool=apollon 0.1.0\n# manifest=")
    (row,) = rows(out)
    assert float(row["value"]) == pytest.approx(1.0, abs=1e-15)
    assert row["method"] == "exact"


def test_metric_alpha_level_flags_lower_bound(specs, capsys):
    code, out, _ = run(capsys, "metric", "alpha", "--spec", "disk.yaml", "--pair", "0,0", "0.5,0", "--level", "5")
    assert code == 0
    (row,) = rows(out)
    assert row["bound"] == "lower" and row["method"] == "sampled(5)" and row["level"] == "5"


def test_unknown_variant_exit_2(specs, capsys):
    Path("bad.yaml").write_text("variant: torus\ndim: 2\n")
    code, _, err = run(capsys, "metric", "j", "--spec", "bad.yaml", "--pair", "0,1", "0,2")
    assert code == 2 and "unknown variant" in err


def test_parse_error_names_line(specs, capsys):
    code, _, err = run(capsys, "metric", "j", "--spec", "broken.yaml", "--pair", "0,1", "0,2")
    assert code == 2 and "line" in err


def test_point_outside_domain_is_numerical_fault_naming_pair(specs, capsys):
    code, _, err = run(capsys, "metric", "j", "--spec", "half_plane.yaml", "--pair", "0,1", "0,2",
                       "--pair", "0,-1", "0,2")
    assert code == 1 and "pair 1" in err


def test_usage_errors(specs, capsys):
    assert run(capsys, "verify", "nonsense")[0] == 2
    assert run(capsys, "metric", "k")[0] == 2
    assert run(capsys, "estimate", "gromov", "--spec", "half_plane.yaml")[0] == 2  # unbounded needs a window
    assert run(capsys, "estimate", "rough_bilip", "--spec", "punctured.yaml", "--window=-1,-1:1,1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_estimate_uniformity_single_pair(specs, capsys):
    code, out, _ = run(capsys, "estimate", "uniformity", "--spec", "half_plane.yaml", "--count", "1",
                       "--window=-1,0:1,2")
    assert code == 0
    vals = {r["quantity"]: r["value"] for r in rows(out)}
    assert float(vals["d"]) == 0.0 and float(vals["c"]) > 0


def test_rough_bilip_identity(specs, capsys):
    Path("id.yaml").write_text("variant: identity\ndim: 2\n")
    code, out, _ = run(capsys, "estimate", "rough_bilip", "--spec", "punctured.yaml", "--map", "id.yaml",
                       "--count", "50", "--window=-1,-1:1,1")
    vals = {r["quantity"]: r["value"] for r in rows(out)}
    assert code == 0 and float(vals["M"]) == 1.0 and float(vals["C"]) == 0.0


def test_estimate_writes_table_and_manifest(specs, capsys):
    code, _, _ = run(capsys, "estimate", "phi", "--spec", "half_plane.yaml", "--count", "100", "--bins", "4",
                     "--window=-5,0:5,5", "--out", "phi.csv")
    assert code == 0
    assert Path("phi.table.csv").exists()
    man = json.loads(Path("phi.csv.manifest.json").read_text())
    assert man["seeds"] == [0] and man["counts"] == [100] and man["tool"] == "apollon 0.1.0"
    assert man["specs"]["domain"]["content"]["variant"] == "half_space"
    assert f"# manifest={man['manifest_hash']}" in Path("phi.csv").read_text()


def test_replay_is_byte_identical(specs, capsys):
    argv = ["estimate", "gromov", "--spec", "half_plane.yaml", "--count", "200", "--seed", "4",
            "--window=-5,0:5,5", "--out", "a.csv"]
    assert main(argv) == 0
    assert main(["replay", "a.csv.manifest.json", "--out", "b.csv"]) == 0
    assert Path("a.csv").read_bytes() == Path("b.csv").read_bytes()
    Path("half_plane.yaml").write_text("variant: half_space\ndim: 2\nnormal: [0.0, 1.0]\noffset: 1.0\n")
    assert main(["replay", "a.csv.manifest.json", "--out", "c.csv"]) == 2


def test_geodesic_csv(specs, capsys):
    code, out, err = run(capsys, "geodesic", "--spec", "punctured.yaml", "--pair", "1,0", "-1,0",
                         "--resolution", "0.05", "--window=-2,-2:2,2")
    r = rows(out)
    assert code == 0 and err == ""
    assert float(r[-1]["k"]) == pytest.approx(math.pi, rel=2e-2)
    code, _, err = run(capsys, "geodesic", "--spec", "punctured.yaml", "--pair", "1,0", "-1,0",
                       "--resolution", "0.1", "--window=-1.05,-0.5:1.05,1")
    assert "touches the grid window" in err


def test_verify_mobius_suite(capsys):
    code, out, _ = run(capsys, "verify", "mobius_invariance", "--count", "50")
    assert code == 0
    assert all(r["passed"] == "true" for r in rows(out))


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_outputs(name, specs, capsys):
    assert main(CASES[name] + ["--out", name]) == 0
    assert Path(name).read_text() == (GOLDEN / name).read_text()
