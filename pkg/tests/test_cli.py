import json

import pytest

from stretchseries.cli import AnalysisConfig, builtin_series, main, run_recipe
from stretchseries.generators import load_coefficients


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_and_reload(tmp_path, capsys):
    path = tmp_path / "fp.txt"
    code, _, _ = run(capsys, "generate", "--family", "fragmented", "--order", "20", "--out", str(path))
    assert code == 0
    assert load_coefficients(path).series == builtin_series("fragmented", 20)


def test_generate_to_stdout(capsys):
    code, out, _ = run(capsys, "generate", "--family", "binomial", "--order", "4", "--mu", "4",
                       "--gamma", "1/2")
    assert code == 0 and out.splitlines()[-5:] == ["1", "2", "6", "20", "70"]


def test_ratios_csv(capsys):
    code, out, _ = run(capsys, "ratios", "--family", "fragmented", "--order", "10")
    lines = out.splitlines()
    assert lines[0] == "n,1/n,r_n,gamma_n" and len(lines) == 11


def test_sigma_reports_each_estimator(tmp_path, capsys):
    code, out, _ = run(capsys, "sigma", "--family", "fragmented", "--order", "50", "--mu", "2",
                       "--out", str(tmp_path))
    assert code == 0
    assert {"ratio-of-ratios", "root-ratio", "loglog-known-mu"} <= {ln.split(":")[0] for ln in out.splitlines()}
    assert (tmp_path / "sigma_root-ratio.csv").exists()


def test_bst_limit(tmp_path, capsys):
    table = tmp_path / "bst.csv"
    code, out, _ = run(capsys, "bst", "--family", "fragmented", "--order", "50", "--w", "1/2",
                       "--out", str(table))
    assert code == 0 and out.startswith("limit = 1.99999")
    assert table.read_text().startswith("L,")


def test_fit_pair_json(capsys):
    code, out, _ = run(capsys, "fit", "--family", "fragmented", "--order", "50", "--kind", "pair",
                       "--sigma", "1/2", "--mu", "2")
    data = json.loads(out)
    assert code == 0 and abs(data["derived"]["log_mu1"] - 2) < 0.05
    assert data["abscissa"] == {"c1": "1", "c2": "1/2"}


def test_fit_amplitude_needs_parameters(capsys):
    with pytest.raises(SystemExit):
        main(["fit", "--family", "fragmented", "--kind", "amplitude", "--sigma", "1/2", "--mu", "2"])


def test_da_survey(tmp_path, capsys):
    js = tmp_path / "da.json"
    code, out, _ = run(capsys, "da", "--family", "binomial", "--order", "30", "--M", "1",
                       "--degrees", "3:5", "--L", "0,1", "--json", str(js))
    assert code == 0 and "suspect non-algebraic: False" in out
    assert abs(json.loads(js.read_text())["aggregate"]["zc_mean"] - 0.25) < 1e-10


def test_transform_writes_decimals(tmp_path, capsys):
    path = tmp_path / "d.txt"
    code, _, _ = run(capsys, "transform", "--family", "fragmented", "--order", "20", "--sigma", "1/2",
                     "--out", str(path))
    src = load_coefficients(path)
    assert code == 0 and src.inexact and src.series.start == 2


def test_missing_file_is_a_clean_error(tmp_path, capsys):
    code, _, err = run(capsys, "ratios", "--input", str(tmp_path / "nope.txt"))
    assert code == 2 and "error" in err


def test_bad_file_names_the_line(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("1\n2\nthree\n")
    code, _, err = run(capsys, "ratios", "--input", str(path))
    assert code == 2 and "bad.txt:3" in err


def test_recipe_on_algebraic_series(tmp_path):
    rep = run_recipe(AnalysisConfig(family="binomial", order=40, out=str(tmp_path)))
    assert rep["verdict"] == "algebraic"
    assert (tmp_path / "report.json").exists()


def test_analyze_is_deterministic(tmp_path, capsys):
    outs = []
    d = tmp_path / "run"
    for _ in range(2):
        code, out, _ = run(capsys, "analyze", "--family", "fragmented", "--order", "50", "--out", str(d))
        assert code == 0 and "verdict: stretched-exponential" in out
        outs.append((d / "report.json").read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["schema"] == "stretchseries.report/1"
