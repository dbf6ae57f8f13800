import json
import os

import numpy as np
import pytest

from jdsp.cli import main
from jdsp.signals import Signal, read_wav, write_wav

FIG4_GRAPH = {
    "version": 1,
    "blocks": [
        {"id": "gen1", "type": "SignalGenerator",
         "params": {"kind": "sine", "freq_hz": 1000.0, "amplitude": 1.0,
                    "length": 256, "sample_rate_hz": 8000.0}},
        {"id": "des1", "type": "FilterDesigner",
         "params": {"method": "butterworth", "order": 4, "cutoff": 1.0}},
        {"id": "flt1", "type": "FirIirFilter"},
        {"id": "fft1", "type": "Fft"},
        {"id": "fr1", "type": "FrequencyResponse"},
        {"id": "pz1", "type": "PoleZero"},
    ],
    "wires": [
        {"from": "gen1.out", "to": "flt1.in"},
        {"from": "des1.tf", "to": "flt1.tf"},
        {"from": "flt1.out", "to": "fft1.in"},
        {"from": "des1.tf", "to": "fr1.tf"},
        {"from": "des1.tf", "to": "pz1.tf"},
    ],
}


def _write_graph(tmp_path, graph=FIG4_GRAPH):
    path = tmp_path / "graph.json"
    path.write_text(json.dumps(graph))
    return str(path)


def test_catalog_json(capsys):
    assert main(["catalog", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert any(d["type_name"] == "SignalGenerator" for d in data)


def test_catalog_table(capsys):
    assert main(["catalog"]) == 0
    assert "SignalGenerator" in capsys.readouterr().out


def test_run_missing_file(capsys):
    assert main(["run", "missing.json"]) == 1
    assert "file not found" in capsys.readouterr().err


def test_run_writes_sink_outputs(tmp_path, capsys):
    gpath = _write_graph(tmp_path)
    out = tmp_path / "out"
    assert main(["run", gpath, "--seed", "42", "--out", str(out)]) == 0
    names = sorted(os.listdir(out))
    assert names == ["fft1.out.csv", "fr1.out.csv", "pz1.out.csv"]
    pz = (out / "pz1.out.csv").read_text()
    assert pz.splitlines()[0] == "kind,re,im"
    assert any(line.startswith("pole,") for line in pz.splitlines())


def test_run_is_byte_deterministic(tmp_path):
    gpath = _write_graph(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", gpath, "--seed", "42", "--out", str(a)]) == 0
    assert main(["run", gpath, "--seed", "42", "--out", str(b)]) == 0
    for name in os.listdir(a):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_run_validation_failure_exits_1(tmp_path, capsys):
    bad = dict(FIG4_GRAPH, wires=FIG4_GRAPH["wires"] + [{"from": "gen1.out", "to": "flt1.in"}])
    gpath = _write_graph(tmp_path, bad)
    assert main(["run", gpath]) == 1
    assert "DuplicateInputWire" in capsys.readouterr().err


def test_run_engine_failure_exits_2(tmp_path, capsys):
    graph = {
        "version": 1,
        "blocks": [
            {"id": "g", "type": "SignalGenerator", "params": {"kind": "impulse", "length": 8}},
            {"id": "f", "type": "FirIirFilter", "params": {"a": [1.0, -2.0]}},
        ],
        "wires": [{"from": "g.out", "to": "f.in"}],
    }
    assert main(["run", _write_graph(tmp_path, graph)]) == 2
    assert "BlockRuntimeError" in capsys.readouterr().err


def test_run_selected_output(tmp_path):
    gpath = _write_graph(tmp_path)
    out = tmp_path / "sel"
    assert main(["run", gpath, "--out", str(out), "--output", "flt1.out"]) == 0
    assert os.listdir(out) == ["flt1.out.csv"]


def test_design_iir_writes_tf(tmp_path, capsys):
    path = tmp_path / "tf.json"
    assert main(["design", "iir", "--family", "butterworth", "--order", "2",
                 "--cutoff", "1.5707963267948966", "--out", str(path)]) == 0
    tf = json.loads(path.read_text())
    assert np.allclose(tf["b"], [0.2928932188134524, 0.5857864376269048, 0.2928932188134524])
    assert np.allclose(tf["a"][1:], [0.0, 0.171572875253810], atol=1e-12)


def test_design_fir_stdout(capsys):
    assert main(["design", "fir", "--method", "kaiser", "--passband-edge", "0.628",
                 "--stopband-edge", "0.942", "--atten-db", "60"]) == 0
    tf = json.loads(capsys.readouterr().out)
    assert tf["a"] == [1.0]
    b = np.asarray(tf["b"])
    assert np.max(np.abs(b - b[::-1])) < 1e-14


def test_design_usage_error(capsys):
    assert main(["design", "fir", "--method", "kaiser"]) == 1


def test_design_runtime_error(capsys):
    assert main(["design", "iir", "--family", "cheby1", "--order", "4",
                 "--cutoff", "1.0"]) == 2
    assert "InvalidSpec" in capsys.readouterr().err


def test_qft_codec_deterministic_report(tmp_path):
    t = np.arange(256)
    tone = 0.7 * np.sin(2 * np.pi * 8 * t / 256)
    wav = tmp_path / "tone.wav"
    wav.write_bytes(write_wav(Signal(tone, 8000)))
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    args = ["qft-codec", "--input", str(wav), "--qubits", "8", "--peaks", "4", "--seed", "42"]
    assert main(args + ["--out", str(r1)]) == 0
    assert main(args + ["--out", str(r2)]) == 0
    assert r1.read_bytes() == r2.read_bytes()
    report = json.loads(r1.read_text())
    assert report["n_qubits"] == 8 and report["peaks"] == 4 and report["seed"] == 42
    assert 8 in report["retained_bins"] and 248 in report["retained_bins"]
    assert report["snr_db"] > 60.0


def test_qft_codec_save_audio(tmp_path):
    t = np.arange(128)
    wav = tmp_path / "in.wav"
    wav.write_bytes(write_wav(Signal(0.5 * np.sin(2 * np.pi * 4 * t / 128), 8000)))
    audio = tmp_path / "rec.wav"
    assert main(["qft-codec", "--input", str(wav), "--qubits", "7", "--peaks", "64",
                 "--out", str(tmp_path / "r.json"), "--save-audio", str(audio)]) == 0
    rec = read_wav(audio.read_bytes())
    assert len(rec) == 128


def test_kmeans_command(tmp_path, capsys):
    rng = np.random.default_rng(0)
    lines = ["label,f1,f2"]
    for label, center in ((0, (300.0, 2300.0)), (1, (700.0, 1200.0))):
        for _ in range(60):
            f1, f2 = rng.normal(center, 30.0)
            lines.append(f"{label},{f1},{f2}")
    feats = tmp_path / "features.csv"
    feats.write_text("\n".join(lines))
    out = tmp_path / "confusion.csv"
    assert main(["kmeans", "--input", str(feats), "--k", "2", "--seed", "5",
                 "--out", str(out)]) == 0
    text = out.read_text().splitlines()
    assert text[0] == "0,1"
    assert text[-1].startswith("accuracy,")
    assert float(text[-1].split(",")[1]) >= 0.9


def test_kmeans_bad_header(tmp_path, capsys):
    feats = tmp_path / "bad.csv"
    feats.write_text("a,b\n1,2")
    assert main(["kmeans", "--input", str(feats), "--k", "2"]) == 1


def test_bad_subcommand_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
