import json
import subprocess
import sys
from pathlib import Path

import pytest

from tabsynth import __version__
from tabsynth.cli import main
from tabsynth.config import load_config, parse_config
from tabsynth.data import Dataset, load_csv, write_csv
from tabsynth.errors import ConfigError
from tabsynth.gan import GanModel


def _write_config(path: Path, doc: dict) -> Path:
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def _run(capsys, *argv):
    code = main(list(argv))
    err = capsys.readouterr().err
    return code, err


def test_parse_config_minimal(tmp_path):
    run = parse_config('{"method": "copula", "seed": 3, "output": {"dataset": "o.csv"}, "copula": {}}',
                       tmp_path)
    assert run.method == "copula" and run.seed == 3
    assert run.output("dataset") == tmp_path / "o.csv"
    assert parse_config('{"method": "copula", "seed": 3, "copula": {}}', seed_override=9).seed == 9


@pytest.mark.parametrize("text, field", [
    ('{"method": "copula", "copula": {}}', "seed"),
    ('{"seed": 1, "copula": {}}', "method"),
    ('{"method": "copula", "seed": 1}', "copula"),
    ('{"method": "copula", "seed": 1, "copula": {}, "abm": {}}', "copula"),
    ('{"method": "copula", "seed": 1, "copula": {"rho": 1}}', "copula.rho"),
    ('{"method": "copula", "seed": 1, "copula": {"n": "many"}}', "copula.n"),
    ('{"method": "copula", "seed": 1.5, "copula": {}}', "seed"),
    ('{"method": "copula", "seed": 1, "colour": 2, "copula": {}}', "colour"),
    ('{"method": "bootstrap", "seed": 1, "bootstrap": {}}', "input"),
    ('{"method": "gan", "seed": 1, "gan": {}}', "input"),
    ('{"method": "abm", "seed": 1, "abm": {"score_column": "s"}}', "input"),
    ('{"method": "copula", "seed": 1, "copula": {}, "output": {"plot": "x"}}', "output.plot"),
    ('{"method": "copula", "seed": 1, "copula": {}, "input": ""}', "input"),
])
def test_parse_config_errors_name_field(text, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field
    assert str(info.value).startswith(field)


def test_parse_config_json_error_has_position():
    with pytest.raises(ConfigError, match="line 2, column"):
        parse_config('{"method": "copula",\n "seed": }')


def test_generate_multivariate(tmp_path, capsys):
    cfg = _write_config(tmp_path / "mv.json", {
        "method": "multivariate", "seed": 5,
        "output": {"dataset": "out/mv.csv", "report_dir": "out/report"},
        "multivariate": {"n": 1000},
    })
    code, err = _run(capsys, "generate", "--config", str(cfg))
    assert code == 0, err
    d = load_csv((tmp_path / "out/mv.csv").read_bytes())
    assert d.n_rows == 1000
    manifest = json.loads((tmp_path / "out/mv.csv.manifest.json").read_text())
    assert manifest["seed"] == 5 and manifest["manifest"]["rows"] == 1000
    assert manifest["multivariate"]["means"] == [70.0, 65.0, 60.0]
    assert (tmp_path / "out/report/heatmap.svg").exists()
    assert (tmp_path / "out/report/pairplot.svg").exists()


def test_generate_twice_is_byte_identical_and_manifest_reruns(tmp_path, capsys):
    cfg = _write_config(tmp_path / "c.json", {
        "method": "copula", "seed": 11, "output": {"dataset": "a.csv"}, "copula": {"n": 300},
    })
    assert _run(capsys, "generate", "--config", str(cfg))[0] == 0
    first = (tmp_path / "a.csv").read_bytes()
    assert _run(capsys, "generate", "--config", str(cfg))[0] == 0
    assert (tmp_path / "a.csv").read_bytes() == first

    manifest = tmp_path / "a.csv.manifest.json"
    saved = manifest.read_bytes()
    (tmp_path / "a.csv").unlink()
    assert _run(capsys, "generate", "--config", str(manifest))[0] == 0
    assert (tmp_path / "a.csv").read_bytes() == first
    assert manifest.read_bytes() == saved


def test_seed_override(tmp_path, capsys):
    cfg = _write_config(tmp_path / "c.json", {
        "method": "abm", "seed": 1, "output": {"dataset": "a.csv"}, "abm": {"n_agents": 50},
    })
    _run(capsys, "generate", "--config", str(cfg))
    base = (tmp_path / "a.csv").read_bytes()
    _run(capsys, "generate", "--config", str(cfg), "--seed", "2")
    assert (tmp_path / "a.csv").read_bytes() != base
    assert json.loads((tmp_path / "a.csv.manifest.json").read_text())["seed"] == 2


def test_bootstrap_missing_input_exits_2(tmp_path, capsys):
    cfg = _write_config(tmp_path / "b.json", {
        "method": "bootstrap", "seed": 1, "output": {"dataset": "b.csv"}, "bootstrap": {},
    })
    code, err = _run(capsys, "generate", "--config", str(cfg))
    assert code == 2
    assert err.startswith("tabsynth: error:") and "input" in err
    assert err.count("\n") == 1


def test_runtime_errors_exit_1(tmp_path, capsys):
    (tmp_path / "flat.csv").write_bytes(b"a,b\n1,1\n1,2\n1,3\n")
    cfg = _write_config(tmp_path / "g.json", {
        "method": "gan", "seed": 1, "input": "flat.csv",
        "output": {"model": "m.json"}, "gan": {"epochs": 1},
    })
    code, err = _run(capsys, "train-gan", "--config", str(cfg))
    assert code == 1 and "degenerate" in err and "'a'" in err

    cfg = _write_config(tmp_path / "missing.json", {
        "method": "bootstrap", "seed": 1, "input": "nope.csv",
        "output": {"dataset": "b.csv"}, "bootstrap": {},
    })
    code, err = _run(capsys, "generate", "--config", str(cfg))
    assert code == 1 and err.startswith("tabsynth: error:")


def test_config_problems_exit_2(tmp_path, capsys):
    assert _run(capsys, "generate", "--config", str(tmp_path / "absent.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, err = _run(capsys, "generate", "--config", str(bad))
    assert code == 2 and "line 1" in err
    with pytest.raises(SystemExit) as info:
        main(["generate"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["evaluate", "--real", "a", "--synth", "b", "--out", "c", "--seed", "-1"])
    assert info.value.code == 2


def test_train_gan_zero_epochs(tmp_path, capsys):
    d = Dataset(["x", "y"], [[0, 1], [1, 3], [2, 2], [3, 5]])
    (tmp_path / "real.csv").write_bytes(write_csv(d))
    cfg = _write_config(tmp_path / "g.json", {
        "method": "gan", "seed": 4, "input": "real.csv",
        "output": {"model": "m/model.json"}, "gan": {"epochs": 0},
    })
    assert _run(capsys, "train-gan", "--config", str(cfg))[0] == 0
    model = GanModel.from_json((tmp_path / "m/model.json").read_text())
    assert model.config.epochs == 0
    assert (tmp_path / "m/model.log.csv").read_text() == "step,d_loss,g_loss\n"

    cfg2 = _write_config(tmp_path / "g2.json", {
        "method": "gan", "seed": 4, "input": "real.csv",
        "output": {"model": "m/model.json", "train_log": "m/log.csv"}, "gan": {"epochs": 30},
    })
    assert _run(capsys, "train-gan", "--config", str(cfg2))[0] == 0
    first = (tmp_path / "m/model.json").read_bytes()
    assert _run(capsys, "train-gan", "--config", str(cfg2))[0] == 0
    assert (tmp_path / "m/model.json").read_bytes() == first
    assert len((tmp_path / "m/log.csv").read_text().splitlines()) == 31


def test_train_gan_needs_gan_method(tmp_path, capsys):
    cfg = _write_config(tmp_path / "c.json", {
        "method": "copula", "seed": 1, "output": {"model": "m.json"}, "copula": {},
    })
    assert _run(capsys, "train-gan", "--config", str(cfg))[0] == 2


def test_evaluate_self_and_mismatch(tmp_path, capsys):
    d = Dataset(["x", "y"], [[0, 1], [1, 3], [2, 2], [3, 5]])
    (tmp_path / "d.csv").write_bytes(write_csv(d))
    (tmp_path / "e.csv").write_bytes(write_csv(Dataset(["x", "z"], d.values)))
    out = tmp_path / "report"
    code, _ = _run(capsys, "evaluate", "--real", str(tmp_path / "d.csv"),
                   "--synth", str(tmp_path / "d.csv"), "--out", str(out))
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["corr_max_abs_diff"] == 0.0
    assert all(c["ks"] == 0.0 for c in report["per_column"])
    for name in ("heatmap_real.svg", "heatmap_synth.svg", "heatmap_diff.svg", "pairplot.svg"):
        assert (out / name).exists()

    code, err = _run(capsys, "evaluate", "--real", str(tmp_path / "d.csv"),
                     "--synth", str(tmp_path / "e.csv"), "--out", str(out))
    assert code == 1 and "only in real: y" in err and "only in synthetic: z" in err


def test_multivariate_fresh_draw_close(tmp_path, capsys):
    for seed in (1, 2):
        cfg = _write_config(tmp_path / f"c{seed}.json", {
            "method": "multivariate", "seed": seed, "output": {"dataset": f"d{seed}.csv"},
            "multivariate": {},
        })
        assert _run(capsys, "generate", "--config", str(cfg))[0] == 0
    assert _run(capsys, "evaluate", "--real", str(tmp_path / "d1.csv"), "--synth",
                str(tmp_path / "d2.csv"), "--out", str(tmp_path / "r"))[0] == 0
    report = json.loads((tmp_path / "r/report.json").read_text())
    assert report["corr_max_abs_diff"] <= 0.05


def test_console_entry_points():
    out = subprocess.run([sys.executable, "-m", "tabsynth", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == f"tabsynth {__version__}"
    res = subprocess.run([sys.executable, "-m", "tabsynth", "generate"], capture_output=True, text=True)
    assert res.returncode == 2 and "tabsynth: error:" in res.stderr


def test_shipped_configs_parse():
    root = Path(__file__).resolve().parent.parent / "configs"
    paths = sorted(root.glob("*.json"))
    assert [p.stem for p in paths] == ["abm", "bootstrap", "copula", "gan", "multivariate"]
    for p in paths:
        run = load_config(p)
        assert run.method == p.stem
