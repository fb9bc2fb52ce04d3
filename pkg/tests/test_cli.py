import json

import numpy as np

from whqrom.cli import main
from whqrom.wht import quantize
from whqrom import wht, baseline


def run(tmp_path, *argv):
    return main(["--out", str(tmp_path)] + list(argv))


class TestWhtAnalyze:
    def test_zero_input_gives_k_zero(self, tmp_path):
        data = np.zeros(64)
        path = tmp_path / "zero.f64"
        path.write_bytes(data.astype("<f8").tobytes())
        code = run(tmp_path, "wht-analyze", "--input", str(path), "--digits", "8")
        assert code == 0
        report = json.loads((tmp_path / "wht_analyze.json").read_text())
        assert report["chosenK"] == 0
        assert report["errorAtK"] == 0.0

    def test_synthetic_matches_library(self, tmp_path):
        code = run(
            tmp_path,
            "wht-analyze",
            "--synthetic",
            "harmonic",
            "--dims",
            "2",
            "--eta",
            "12",
            "--digits",
            "15",
        )
        assert code == 0
        report = json.loads((tmp_path / "wht_analyze.json").read_text())
        from whqrom.synthetic import make_pes

        f = quantize(make_pes("harmonic", 2).sample(12), 15)
        trunc = wht.minimal_truncation(f, 2.0**-10)
        assert report["chosenK"] == trunc.k

    def test_csv_and_binary_agree(self, tmp_path):
        rng = np.random.default_rng(5)
        data = rng.uniform(-1, 1, size=128)
        b = tmp_path / "t.f64"
        c = tmp_path / "t.csv"
        b.write_bytes(data.astype("<f8").tobytes())
        c.write_text("".join(f"{float(v)!r}\n" for v in data))
        out_b = tmp_path / "ob"
        out_c = tmp_path / "oc"
        assert main(["--out", str(out_b), "wht-analyze", "--input", str(b)]) == 0
        assert main(["--out", str(out_c), "wht-analyze", "--input", str(c)]) == 0
        assert (out_b / "wht_analyze.json").read_bytes() == (
            out_c / "wht_analyze.json"
        ).read_bytes()

    def test_malformed_csv_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("0.5\nnope\n")
        assert run(tmp_path, "wht-analyze", "--input", str(bad)) == 3


class TestQromSynth:
    def test_writes_circuit_and_cost(self, tmp_path):
        code = run(tmp_path, "qrom-synth", "--synthetic", "harmonic", "--eta", "8")
        assert code == 0
        report = json.loads((tmp_path / "qrom_synth.json").read_text())
        text = (tmp_path / "qrom_circuit.txt").read_text()
        from whqrom.qrom import circuit_from_lines, cost

        circuit = circuit_from_lines(text)
        assert cost(circuit).to_json_dict() == report["cost"]


class TestCompare:
    def test_both_modes_emitted(self, tmp_path):
        code = run(
            tmp_path, "compare", "--synthetic", "harmonic", "--dims", "2", "--eta", "12"
        )
        assert code == 0
        report = json.loads((tmp_path / "compare.json").read_text())
        assert report["rawPes"]["ratios"]["toffoliCount"] > 1
        assert report["arccosRotation"] is not None
        assert report["arccosRotation"]["dWh"] == 14

    def test_raw_counts_cross_checked_against_library(self, tmp_path):
        code = run(
            tmp_path, "compare", "--synthetic", "harmonic", "--dims", "2", "--eta", "10"
        )
        assert code == 0
        report = json.loads((tmp_path / "compare.json").read_text())
        from whqrom.synthetic import make_pes

        f = quantize(make_pes("harmonic", 2).sample(10), 15)
        record = baseline.compare(f, 2.0**-10, d_ss=15)
        assert report["rawPes"]["whQrom"] == record.wh.to_json_dict()
        assert report["rawPes"]["selectSwap"] == record.ss.to_json_dict()

    def test_degenerate_constant_flags_infinity(self, tmp_path):
        path = tmp_path / "flat.f64"
        path.write_bytes(np.zeros(32).astype("<f8").tobytes())
        code = run(tmp_path, "compare", "--input", str(path))
        assert code == 0
        report = json.loads((tmp_path / "compare.json").read_text())
        assert report["rawPes"]["ratios"]["toffoliCount"] == "∞"


class TestDvrCheck:
    def test_passes_and_exports(self, tmp_path):
        code = run(tmp_path, "dvr-check", "--kind", "hermite", "--n", "16", "--segment", "4")
        assert code == 0
        report = json.loads((tmp_path / "dvr_check.json").read_text())
        assert report["orthogonalityError"] < 1e-10
        t = np.loadtxt(tmp_path / "t_matrix.csv", delimiter=",")
        assert t.shape == (16, 16)

    def test_bad_segment_is_config_error(self, tmp_path):
        assert run(tmp_path, "dvr-check", "--n", "12", "--segment", "8") == 2


class TestBlockencVerify:
    def test_random_rounds(self, tmp_path):
        code = run(tmp_path, "--seed", "3", "blockenc-verify", "--count", "1")
        assert code == 0
        report = json.loads((tmp_path / "blockenc_verify.json").read_text())
        assert report["worstResidual"] < 1e-9
        names = {r["construction"] for r in report["records"]}
        assert "dsparse_standard" in names and "symmetry_swap" in names

    def test_coo_input(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,0,0.5\n0,1,0.25\n1,0,0.25\n1,1,-0.75\n")
        code = run(tmp_path, "blockenc-verify", "--input", str(path))
        assert code == 0


class TestMolham:
    def test_bundled_water(self, tmp_path):
        code = run(tmp_path, "molham", "--strategy", "FBR_DVR")
        assert code == 0
        report = json.loads((tmp_path / "molham.json").read_text())
        assert len(report["eigenvaluesCm"]) == 8
        assert report["strategies"][0]["strategy"] == "FBR_DVR"
        assert report["strategies"][0]["qpe"]["tCount"] > 0

    def test_config_error_field_path(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("basis_sizes: [8, 8, 8]\nmasses_da: [-1.0, 1.0]\nfreqs_cm: [100, 100]\n")
        code = run(tmp_path, "molham", "--config", str(cfg))
        assert code == 2
        assert "masses_da" in capsys.readouterr().err

    def test_sweep_csv_feeds_fit(self, tmp_path):
        code = run(
            tmp_path,
            "molham",
            "--strategy",
            "FBR_DVR",
            "--sweep",
            "8",
            "10",
            "12",
            "--sweep-eps",
            "6",
            "8",
            "10",
        )
        assert code == 0
        sweep = (tmp_path / "molham_sweep.csv").read_text().splitlines()
        assert sweep[0] == "eta,epsilon,toffoli,kRetained"
        assert len(sweep) == 10
        code = run(tmp_path, "fit-scaling", "--input", str(tmp_path / "molham_sweep.csv"))
        assert code == 0
        fit = json.loads((tmp_path / "fit_scaling.json").read_text())
        assert 0 <= fit["fit"]["c1"] < 1


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        args = [
            "--seed",
            "11",
            "blockenc-verify",
            "--count",
            "2",
        ]
        assert main(["--out", str(out1)] + args) == 0
        assert main(["--out", str(out2)] + args) == 0
        assert (out1 / "blockenc_verify.json").read_bytes() == (
            out2 / "blockenc_verify.json"
        ).read_bytes()

    def test_csv_format_emits_both(self, tmp_path):
        code = main(
            ["--out", str(tmp_path), "--format", "csv", "dvr-check", "--n", "8"]
        )
        assert code == 0
        assert (tmp_path / "dvr_check.json").exists()
        assert (tmp_path / "dvr_check.csv").exists()

    def test_worker_pool_matches_serial(self, tmp_path):
        serial, pooled = tmp_path / "serial", tmp_path / "pooled"
        base = [
            "molham",
            "--strategy",
            "FBR_DVR",
            "--sweep",
            "8",
            "10",
            "--sweep-eps",
            "6",
            "8",
        ]
        assert main(["--out", str(serial)] + base + ["--jobs", "1"]) == 0
        assert main(["--out", str(pooled)] + base + ["--jobs", "2"]) == 0
        assert (serial / "molham_sweep.csv").read_bytes() == (
            pooled / "molham_sweep.csv"
        ).read_bytes()
