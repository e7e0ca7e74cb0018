import json
import math

import numpy as np
import pytest

from besovmorrey.cli import main
from besovmorrey.dyadic import DyadicSequence, save_csv
from besovmorrey.wavelet import SampledFunction, save_samples

HOLD_SRC = "s=1,p=2,q=2,phi=power(2),d=1"
HOLD_TGT = "s=0,p=2,q=2,phi=power(2),d=1"


def test_check_holds(capsys):
    code = main(["check", "--source", HOLD_SRC, "--target", HOLD_TGT])
    out = capsys.readouterr().out
    assert code == 0
    assert "outcome=holds" in out
    assert "method=profile" in out
    assert "note=the embedding is not compact" in out


def test_check_fails(capsys):
    code = main(["check", "--source", HOLD_TGT, "--target", HOLD_SRC])
    out = capsys.readouterr().out
    assert code == 1
    assert "outcome=fails" in out


def test_check_json(capsys):
    code = main(["check", "--json", "--source", HOLD_SRC, "--target", HOLD_TGT])
    lines = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    header = json.loads(lines[0])
    record = json.loads(lines[1])
    assert header["command"] == "check"
    assert header["jmax"] == 64
    assert record["outcome"] == "holds"
    assert record["source"].startswith("s=1.0,")
    assert record["q_star"] == "inf"


def test_check_undetermined_for_tables(tmp_path, capsys):
    table = tmp_path / "profile.csv"
    rows = ["t,value"]
    for k in range(-48, 9):
        t = 2.0 ** k
        rows.append("%r,%r" % (t, math.sqrt(t)))
    table.write_text("\n".join(rows) + "\n")
    space = "s=0.5,p=2,q=2,phi=table(%s),d=1" % table
    code = main(["check", "--source", space, "--target", space])
    out = capsys.readouterr().out
    assert code == 2
    assert "outcome=undetermined" in out
    assert "method=sampled" in out


def test_check_config_file(tmp_path, capsys):
    cfg = tmp_path / "pair.ini"
    cfg.write_text(
        "[source]\ns = 1\np = 2\nq = 2\nphi = power(2)\nd = 1\n"
        "[target]\ns = 0\np = 2\nq = 2\nphi = power(2)\nd = 1\n"
        "[run]\njmax = 32\n"
    )
    assert main(["check", "--config", str(cfg)]) == 0
    capsys.readouterr()
    # explicit flags override the config blocks
    assert main(["check", "--config", str(cfg),
                 "--target", "s=2,p=2,q=2,phi=power(2),d=1"]) == 1
    out = capsys.readouterr().out
    assert "outcome=fails" in out


def test_check_rejects_bad_input(tmp_path, capsys):
    assert main(["check", "--source", HOLD_SRC]) == 64
    assert main(["check", "--source", "s=1,p=2,q=2,phi=power(oops),d=1",
                 "--target", HOLD_TGT]) == 64
    assert main(["check", "--config", str(tmp_path / "missing.ini")]) == 64
    # a referenced table file that cannot be read is a data problem
    assert main(["check", "--source", "s=1,p=2,q=2,phi=table(%s),d=1" % (tmp_path / "no.csv"),
                 "--target", HOLD_TGT]) == 65
    err = capsys.readouterr().err
    assert err.strip()


def test_norm_command(tmp_path, capsys):
    path = tmp_path / "seq.csv"
    save_csv(DyadicSequence(1, {(0, (0,)): 1.0}), str(path))
    code = main(["norm", "--space", "s=0.5,p=2,q=inf,phi=power(2),d=1",
                 "--seq", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "entries=1" in out
    assert "norm=1.0" in out
    assert main(["norm", "--space", "s=0.5,p=2,q=inf,phi=power(2),d=1",
                 "--seq", str(tmp_path / "gone.csv")]) == 65
    assert main(["norm", "--space", "s=0.5,p=2,q=inf,phi=power(2),d=2",
                 "--seq", str(path)]) == 64


def test_witness_produces_certificate(tmp_path, capsys):
    out_path = tmp_path / "scan.csv"
    code = main([
        "witness",
        "--source", "s=0,p=2,q=2,phi=capped(2),d=1",
        "--target", "s=0,p=2,q=2,phi=power(2),d=1",
        "--depth", "6",
        "--out", str(out_path),
    ])
    assert code == 0
    text = out_path.read_text()
    assert text.startswith("# besovmorrey witness")
    assert "family=simple" in text
    body = [line for line in text.splitlines() if not line.startswith("#")]
    assert body[0] == "index,ratio"
    assert len(body) == 8
    ratios = [float(line.split(",")[1]) for line in body[1:]]
    assert ratios[-1] > ratios[0]
    capsys.readouterr()


def test_witness_refuses_holding_pair(capsys):
    code = main(["witness", "--source", HOLD_SRC, "--target", HOLD_TGT])
    captured = capsys.readouterr()
    assert code == 1
    assert "divergence witnesses exist only for failing pairs" in captured.err


def test_analyze_deterministic(tmp_path, capsys):
    rng = np.random.default_rng(5)
    f = SampledFunction(d=1, js=3, offset=(0,), values=rng.uniform(-1, 1, size=8))
    samples = tmp_path / "samples.csv"
    save_samples(f, str(samples))
    space = "s=0.5,p=2,q=2,phi=power(2),d=1"
    out1 = tmp_path / "coeffs1.csv"
    out2 = tmp_path / "coeffs2.csv"
    assert main(["analyze", "--samples", str(samples), "--space", space,
                 "--out", str(out1)]) == 0
    first = capsys.readouterr().out
    assert main(["analyze", "--samples", str(samples), "--space", space,
                 "--out", str(out2)]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "norm_estimate=" in first
    text1 = out1.read_text()
    assert text1 == out2.read_text()
    assert text1.startswith("# besovmorrey analyze")
    assert "gender,j,m_1,value" in text1


def test_analyze_errors(tmp_path, capsys):
    rng = np.random.default_rng(6)
    f = SampledFunction(d=1, js=2, offset=(0,), values=rng.uniform(-1, 1, size=4))
    samples = tmp_path / "samples.csv"
    save_samples(f, str(samples))
    space = "s=0.5,p=2,q=2,phi=power(2),d=1"
    # no moment count and no space to derive one from
    assert main(["analyze", "--samples", str(samples)]) == 64
    # the space needs two vanishing moments
    assert main(["analyze", "--samples", str(samples), "--space", space,
                 "--moments", "1"]) == 64
    assert main(["analyze", "--samples", str(tmp_path / "gone.csv"),
                 "--moments", "2"]) == 65
    assert main(["analyze", "--samples", str(samples), "--moments", "2",
                 "--depth", "9"]) == 64
    capsys.readouterr()


def _sweep_config(tmp_path, sweep_lines):
    cfg = tmp_path / "sweep.ini"
    cfg.write_text(
        "[source]\ns = 1\np = 2\nq = 2\nphi = power(2)\nd = 1\n"
        "[target]\ns = 0\np = 2\nq = 2\nphi = power(2)\nd = 1\n"
        "[sweep]\n" + "\n".join(sweep_lines) + "\n"
    )
    return cfg


def test_sweep_grid(tmp_path, capsys):
    cfg = _sweep_config(tmp_path, ["target.s = 0;2"])
    out_path = tmp_path / "grid.jsonl"
    assert main(["sweep", "--config", str(cfg), "--out", str(out_path)]) == 0
    lines = out_path.read_text().strip().splitlines()
    header = json.loads(lines[0])
    assert header["command"] == "sweep"
    assert header["count"] == 2
    assert header["keys"] == ["target.s"]
    records = [json.loads(line) for line in lines[1:]]
    assert [r["outcome"] for r in records] == ["holds", "fails"]
    assert records[0]["index"] == 0
    capsys.readouterr()


def test_sweep_records_per_combo_errors(tmp_path, capsys):
    cfg = _sweep_config(tmp_path, ["target.p = 2;-1"])
    out_path = tmp_path / "grid.jsonl"
    assert main(["sweep", "--config", str(cfg), "--out", str(out_path)]) == 0
    lines = out_path.read_text().strip().splitlines()
    records = [json.loads(line) for line in lines[1:]]
    assert records[0]["outcome"] == "holds"
    assert records[1]["outcome"] == "error"
    assert records[1]["error"]
    capsys.readouterr()


def test_sweep_guards(tmp_path, capsys):
    cfg = _sweep_config(tmp_path, ["bogus.s = 1;2"])
    assert main(["sweep", "--config", str(cfg)]) == 64
    values = ";".join(str(k) for k in range(320))
    cfg = _sweep_config(tmp_path, ["source.s = %s" % values, "target.s = %s" % values])
    assert main(["sweep", "--config", str(cfg)]) == 66
    err = capsys.readouterr().err
    assert "cap" in err


def test_cli_surface(capsys):
    assert main([]) == 64
    assert main(["frobnicate"]) == 64
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert "0.1.0" in capsys.readouterr().out
