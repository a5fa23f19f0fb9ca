import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from airfoilgan.cli import main
from airfoilgan.dataset import (
    PerformanceRecord,
    load_canonical,
    load_dataset,
    load_samples,
    save_records,
    save_samples,
)
from airfoilgan.gan import load_checkpoint
from airfoilgan.geometry import naca4, naca4_points, to_selig
from airfoilgan.smoothing import smoothing_loss

SVG_NS = "{http://www.w3.org/2000/svg}"
TINY_TRAIN = ["--g-hidden", "8,8", "--d-hidden", "8", "--batch-size", "16"]


@pytest.fixture
def corpus(tmp_path):
    path = tmp_path / "corpus.csv"
    assert main(["synth", "--count", "2", "--out", str(path), "--seed", "3"]) == 0
    return path


class TestPreprocess:
    def test_single_file(self, tmp_path, capsys):
        src = tmp_path / "dat"
        src.mkdir()
        (src / "naca2412.dat").write_text(to_selig(naca4_points(0.02, 0.4, 0.12, n=80)))
        out = tmp_path / "canon.csv"
        assert main(["preprocess", str(src), str(out)]) == 0
        ids, y = load_canonical(out)
        assert ids == ["naca2412"] and y.shape == (1, 38)
        assert (tmp_path / "canon.csv.manifest.json").exists()

    def test_empty_dir(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        assert main(["preprocess", str(tmp_path / "empty"), str(tmp_path / "o.csv")]) == 2
        assert "no parseable" in capsys.readouterr().err

    def test_failures_not_fatal(self, tmp_path, capsys):
        src = tmp_path / "dat"
        src.mkdir()
        (src / "good.dat").write_text(to_selig(naca4_points(0.0, 0.0, 0.1, n=60)))
        (src / "bad.dat").write_text("bad\n1 0\n0 0\n")
        (src / "junk.dat").write_text("junk\n1 x\n")
        assert main(["preprocess", str(src), str(tmp_path / "o.csv")]) == 0
        err = capsys.readouterr().err
        assert "bad.dat" in err and "junk.dat" in err
        assert load_canonical(tmp_path / "o.csv")[0] == ["good"]

    def test_with_records(self, tmp_path):
        src = tmp_path / "dat"
        src.mkdir()
        (src / "thin.dat").write_text(to_selig(naca4_points(0.0, 0.0, 0.08, n=60)))
        (src / "thick.dat").write_text(to_selig(naca4_points(0.0, 0.0, 0.2, n=60)))
        save_records(
            [PerformanceRecord("thin", 2e6, 0.1, 15.0, 1.5, 0.01), PerformanceRecord("thick", 2e6, 0.1, 3.0, 0.5, 0.01)],
            tmp_path / "perf.csv",
        )
        out = tmp_path / "ds.csv"
        assert main(["preprocess", str(src), str(out), "--records", str(tmp_path / "perf.csv")]) == 0
        d = load_dataset(out)
        assert dict(zip(d.ids, (c.code for c in d.labels))) == {"thin": "110", "thick": "001"}


class TestSynth:
    def test_counts_and_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["synth", "--count", "10", "--out", str(a), "--seed", "1"]) == 0
        assert main(["synth", "--count", "10", "--out", str(b), "--seed", "1"]) == 0
        d = load_dataset(a)
        assert len(d) == 80 and set(d.class_counts().values()) == {10}
        assert a.read_bytes() == b.read_bytes()

    def test_thickness_spans_threshold(self, tmp_path):
        from airfoilgan.geometry import thickness

        out = tmp_path / "big.csv"
        assert main(["synth", "--count", "600", "--out", str(out)]) == 0
        d = load_dataset(out)
        tau = thickness(d.y)
        assert len(d) == 4800
        assert (tau < 0.12).sum() == 2400 and (tau > 0.12).sum() == 2400
        for label, t in zip(d.labels, tau):
            assert (t > 0.12) == bool(label.thick_high)


class TestTrainGenerate:
    def test_epochs_zero_is_init(self, corpus, tmp_path):
        from airfoilgan.gan import GanConfig, init_gan

        out = tmp_path / "c.json"
        assert main(["train", str(corpus), "--out", str(out), "--epochs", "0", "--seed", "5", *TINY_TRAIN]) == 0
        m = load_checkpoint(out)
        init = init_gan(GanConfig(epochs=0, seed=5, g_hidden=(8, 8), d_hidden=(8,), batch_size=16))
        for p, q in zip(m.generator.parameters(), init.generator.parameters()):
            assert p.tobytes() == q.tobytes()

    def test_same_seed_same_bytes(self, corpus, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert main(["train", str(corpus), "--out", str(out), "--omega", "10", "--seed", "7",
                         "--epochs", "3", *TINY_TRAIN]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.report.csv").read_bytes() == (tmp_path / "b.report.csv").read_bytes()
        manifest = json.loads((tmp_path / "a.json.manifest.json").read_text())
        assert manifest["command"] == "train" and manifest["seed"] == 7

    def test_omega_sweep(self, corpus, tmp_path, capsys):
        out = tmp_path / "sweep.json"
        assert main(["train", str(corpus), "--out", str(out), "--omega", "1", "10", "100",
                     "--epochs", "2", *TINY_TRAIN]) == 0
        text = capsys.readouterr().out
        for w in ("1", "10", "100"):
            assert (tmp_path / f"sweep.omega{w}.json").exists()
            assert f"omega={w} " in text and "mean_smooth_component=" in text

    def test_generate_and_filter(self, corpus, tmp_path):
        ckpt = tmp_path / "base.json"
        assert main(["train", str(corpus), "--out", str(ckpt), "--omega", "0", "--epochs", "2", *TINY_TRAIN]) == 0
        raw, filt = tmp_path / "raw.csv", tmp_path / "filt.csv"
        assert main(["generate", str(ckpt), "--class", "000", "--n", "600", "--seed", "3", "--out", str(raw)]) == 0
        assert main(["generate", str(ckpt), "--class", "000", "--n", "600", "--seed", "3", "--out", str(filt),
                     "--sg-filter", "5", "2"]) == 0
        label, y = load_samples(raw)
        _, yf = load_samples(filt)
        assert label.code == "000" and y.shape == (600, 38)
        assert np.all(smoothing_loss(yf, 1.0) <= smoothing_loss(y, 1.0))

    def test_generate_repeatable(self, corpus, tmp_path):
        ckpt = tmp_path / "m.json"
        main(["train", str(corpus), "--out", str(ckpt), "--epochs", "1", *TINY_TRAIN])
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["generate", str(ckpt), "--class", "110", "--n", "1", "--seed", "4", "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_class(self, corpus, tmp_path, capsys):
        ckpt = tmp_path / "m.json"
        main(["train", str(corpus), "--out", str(ckpt), "--epochs", "0", *TINY_TRAIN])
        assert main(["generate", str(ckpt), "--class", "12", "--out", str(tmp_path / "x.csv")]) == 2

    def test_numeric_failure_exit_3(self, corpus, tmp_path, monkeypatch, capsys):
        from airfoilgan import gan as gan_mod

        monkeypatch.setattr(gan_mod, "bce_loss", lambda p, t: (np.full_like(p, np.inf), np.zeros_like(p)))
        rc = main(["train", str(corpus), "--out", str(tmp_path / "m.json"), "--epochs", "3", *TINY_TRAIN])
        assert rc == 3
        assert "epoch 1" in capsys.readouterr().err

    def test_config_file_flags_win(self, corpus, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"train": {"epochs": 0, "seed": 11, "g_hidden": "8,8", "d_hidden": "8"}}))
        out = tmp_path / "m.json"
        assert main(["--config", str(cfg), "train", str(corpus), "--out", str(out), "--seed", "12"]) == 0
        m = load_checkpoint(out)
        assert m.config.epochs == 0 and m.config.seed == 12 and m.config.g_hidden == (8, 8)

    def test_config_unknown_key(self, corpus, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"train": {"bogus": 1}}))
        with pytest.raises(SystemExit) as exc:
            main(["--config", str(cfg), "train", str(corpus), "--out", str(tmp_path / "m.json")])
        assert exc.value.code == 2


class TestEvaluate:
    def test_single_sample_zero_S(self, tmp_path, capsys):
        save_samples("011", naca4(0.02, 0.4, 0.15)[None], tmp_path / "s.csv")
        assert main(["evaluate", str(tmp_path / "s.csv")]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "class,acc_tau,sigma_tau,S"
        cls, acc, sig, s = lines[1].split(",")
        assert cls == "011" and float(acc) == 100.0 and float(s) == 0.0

    def test_duplicates_zero_sigma(self, tmp_path):
        y = np.stack([naca4(0.0, 0.0, 0.1)] * 10)
        save_samples("000", y, tmp_path / "a.csv")
        save_samples("111", y * 2, tmp_path / "b.csv")
        out = tmp_path / "m.csv"
        assert main(["evaluate", str(tmp_path / "a.csv"), str(tmp_path / "b.csv"), "--out", str(out)]) == 0
        rows = [ln.split(",") for ln in out.read_text().splitlines()[1:]]
        assert [r[0] for r in rows] == ["000", "111"]
        assert all(float(r[2]) == 0.0 for r in rows)
        assert float(rows[1][1]) == 100.0

    def test_empty_file(self, tmp_path):
        save_samples("000", np.zeros((0, 38)), tmp_path / "e.csv")
        assert main(["evaluate", str(tmp_path / "e.csv")]) == 2


class TestSmoothAndPlot:
    def test_smooth_dataset(self, corpus, tmp_path):
        out = tmp_path / "sm.csv"
        assert main(["smooth", str(corpus), str(out)]) == 0
        before, after = load_dataset(corpus), load_dataset(out)
        assert after.ids == before.ids and after.labels == before.labels
        assert np.all(smoothing_loss(after.y) <= smoothing_loss(before.y))

    def _polylines(self, path):
        root = ET.parse(path).getroot()
        assert root.tag == f"{SVG_NS}svg" and root.get("viewBox") == "0 0 1000 800"
        return root.findall(f".//{SVG_NS}polyline")

    def test_one_sample(self, tmp_path):
        y = naca4(0.02, 0.4, 0.12)
        save_samples("001", y[None], tmp_path / "s.csv")
        assert main(["plot", str(tmp_path / "s.csv"), "--out", str(tmp_path / "p.svg")]) == 0
        lines = self._polylines(tmp_path / "p.svg")
        assert len(lines) == 2
        assert lines[0].get("points") == lines[1].get("points")
        assert lines[1].get("stroke-dasharray")

    def test_600_samples(self, tmp_path):
        rng = np.random.default_rng(0)
        y = naca4(0.02, 0.4, 0.12) + rng.normal(0, 0.005, (600, 38))
        save_samples("111", y, tmp_path / "s.csv")
        assert main(["plot", str(tmp_path / "s.csv"), "--out", str(tmp_path / "p.svg")]) == 0
        assert len(self._polylines(tmp_path / "p.svg")) == 601
        first = (tmp_path / "p.svg").read_bytes()
        main(["plot", str(tmp_path / "s.csv"), "--out", str(tmp_path / "p.svg")])
        assert (tmp_path / "p.svg").read_bytes() == first

    def test_unwritable(self, tmp_path):
        save_samples("111", naca4(0, 0, 0.1)[None], tmp_path / "s.csv")
        assert main(["plot", str(tmp_path / "s.csv"), "--out", str(tmp_path / "nodir" / "p.svg")]) == 2
