import json

import numpy as np
import pytest

from steerfuse.cli import main

from .oracles import dtw_enum, frechet_enum


def write_log(path, rows):
    with open(path, "w") as fh:
        for step, y_cont, probs in rows:
            fh.write(json.dumps({"step": step, "y_cont": y_cont, "probs": probs}) + "\n")


def one_hot_list(i, n=11):
    p = [0.0] * n
    p[i] = 1.0
    return p


def write_csv(path, pts):
    with open(path, "w") as fh:
        fh.write("x,y\n")
        for x, y in pts:
            fh.write(f"{x:.6f},{y:.6f}\n")


def last_json_line(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


class TestCorrectCommand:
    def test_aligned_log_passes_through(self, tmp_path, capsys):
        src, dst = tmp_path / "in.jsonl", tmp_path / "out.jsonl"
        write_log(src, [(i, 0.05, one_hot_list(5)) for i in range(3)])
        assert main(["correct", "--in", str(src), "--out", str(dst)]) == 0
        summary = last_json_line(capsys)
        assert summary == {"steps": 3, "Case1": 3, "Case2": 0, "Case3": 0, "Case4": 0}
        lines = [json.loads(l) for l in dst.read_text().splitlines()]
        assert [l["y_final"] for l in lines] == [0.05, 0.05, 0.05]
        assert all(l["case_id"] == "Case1" for l in lines)

    def test_misaligned_record_resampled(self, tmp_path, capsys):
        src, dst = tmp_path / "in.jsonl", tmp_path / "out.jsonl"
        write_log(src, [(0, -0.5, one_hot_list(8))])
        assert main(["correct", "--in", str(src), "--out", str(dst)]) == 0
        (line,) = [json.loads(l) for l in dst.read_text().splitlines()]
        assert line["case_id"] == "Case2"
        assert 5.0 / 11.0 <= line["y_final"] <= 7.0 / 11.0  # inside bin 8
        assert line["c_max"] == 1.0

    def test_deterministic_output(self, tmp_path):
        src = tmp_path / "in.jsonl"
        rows = [(i, -0.5 + 0.1 * i, one_hot_list(8)) for i in range(5)]
        write_log(src, rows)
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        main(["correct", "--in", str(src), "--out", str(a), "--seed", "7"])
        main(["correct", "--in", str(src), "--out", str(b), "--seed", "7"])
        assert a.read_bytes() == b.read_bytes()

    def test_empty_input(self, tmp_path, capsys):
        src, dst = tmp_path / "in.jsonl", tmp_path / "out.jsonl"
        src.write_text("")
        assert main(["correct", "--in", str(src), "--out", str(dst)]) == 0
        assert last_json_line(capsys)["steps"] == 0
        assert dst.read_text() == ""

    def test_malformed_line_reports_number(self, tmp_path, capsys):
        src = tmp_path / "in.jsonl"
        src.write_text(json.dumps({"step": 0, "y_cont": 0.0, "probs": one_hot_list(5)}) + "\nbroken\n")
        assert main(["correct", "--in", str(src), "--out", str(tmp_path / "o.jsonl")]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_probs_length_mismatch(self, tmp_path, capsys):
        src = tmp_path / "in.jsonl"
        write_log(src, [(0, 0.0, [0.5, 0.5])])
        assert main(["correct", "--in", str(src), "--out", str(tmp_path / "o.jsonl")]) == 2

    def test_custom_bins(self, tmp_path, capsys):
        src, dst = tmp_path / "in.jsonl", tmp_path / "out.jsonl"
        write_log(src, [(0, -0.8, one_hot_list(0, n=5))])
        assert main(["correct", "--in", str(src), "--out", str(dst), "--bins", "5"]) == 0
        assert last_json_line(capsys)["Case1"] == 1

    def test_missing_input_is_environment_error(self, tmp_path):
        code = main(
            ["correct", "--in", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "o.jsonl")]
        )
        assert code == 3

    def test_threshold_flags_respected(self, tmp_path, capsys):
        src, dst = tmp_path / "in.jsonl", tmp_path / "out.jsonl"
        p = [0.0] * 11
        p[5], p[6] = 0.6, 0.4
        write_log(src, [(0, 0.0, p)])
        main(["correct", "--in", str(src), "--out", str(dst)])
        assert last_json_line(capsys)["Case4"] == 1
        main(["correct", "--in", str(src), "--out", str(dst), "--tau", "0.55"])
        assert last_json_line(capsys)["Case1"] == 1


class TestMetricsCommand:
    def test_identical_files_all_zero(self, tmp_path, capsys, rng):
        pts = np.round(rng.uniform(-5, 5, size=(10, 2)) * 4) / 4
        path = tmp_path / "t.csv"
        write_csv(path, pts)
        assert main(["metrics", "--pred", str(path), "--ref", str(path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc == {"frechet": 0.0, "dtw": 0.0, "abc": 0.0, "cl": 0.0}

    def test_parallel_offset(self, tmp_path, capsys):
        a = [(float(x), 0.0) for x in range(6)]
        b = [(float(x), 2.0) for x in range(6)]
        pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(pa, a)
        write_csv(pb, b)
        assert main(["metrics", "--pred", str(pa), "--ref", str(pb)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["frechet"] == pytest.approx(2.0, abs=1e-6)
        assert doc["abc"] == pytest.approx(10.0, rel=0.02)
        assert doc["cl"] == 0.0

    def test_matches_enumeration_oracle(self, tmp_path, capsys, rng):
        # quarter-unit coordinates survive the 6-decimal CSV round trip
        a = (np.round(rng.uniform(-4, 4, size=(7, 2)) * 4) / 4).tolist()
        b = (np.round(rng.uniform(-4, 4, size=(6, 2)) * 4) / 4).tolist()
        pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(pa, a)
        write_csv(pb, b)
        assert main(["metrics", "--pred", str(pa), "--ref", str(pb)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["frechet"] == pytest.approx(frechet_enum(a, b), abs=1.1e-6)
        assert doc["dtw"] == pytest.approx(dtw_enum(a, b), abs=1.1e-6)

    def test_single_point_is_input_error(self, tmp_path):
        pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(pa, [(0.0, 0.0)])
        write_csv(pb, [(0.0, 0.0), (1.0, 0.0)])
        assert main(["metrics", "--pred", str(pa), "--ref", str(pb)]) == 2

    def test_missing_file(self, tmp_path):
        pb = tmp_path / "b.csv"
        write_csv(pb, [(0.0, 0.0), (1.0, 0.0)])
        assert main(["metrics", "--pred", str(tmp_path / "missing.csv"), "--ref", str(pb)]) == 3


class TestClassifyReportCommand:
    def test_perfect_labels(self, tmp_path, capsys):
        t, p = tmp_path / "t.csv", tmp_path / "p.csv"
        t.write_text("label\n" + "\n".join("0 1 2 1 0".split()) + "\n")
        p.write_text("label\n" + "\n".join("0 1 2 1 0".split()) + "\n")
        assert main(["classify-report", "--true", str(t), "--pred", str(p), "--bins", "3"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["accuracy"] == 1.0

    def test_two_class_fixture(self, tmp_path, capsys):
        t, p = tmp_path / "t.csv", tmp_path / "p.csv"
        t.write_text("0\n0\n1\n")
        p.write_text("0\n1\n1\n")
        assert main(["classify-report", "--true", str(t), "--pred", str(p), "--bins", "2"]) == 0
        doc = json.loads(capsys.readouterr().out)
        by_class = {c["class"]: c for c in doc["classes"]}
        assert by_class[0]["precision"] == 1.0
        assert by_class[0]["recall"] == 0.5
        assert doc["accuracy"] == pytest.approx(2.0 / 3.0, abs=1e-6)
        assert doc["weighted_avg"]["recall"] == doc["accuracy"]

    def test_out_of_range_label(self, tmp_path):
        t, p = tmp_path / "t.csv", tmp_path / "p.csv"
        t.write_text("0\n11\n")
        p.write_text("0\n1\n")
        assert main(["classify-report", "--true", str(t), "--pred", str(p)]) == 2

    def test_length_mismatch(self, tmp_path):
        t, p = tmp_path / "t.csv", tmp_path / "p.csv"
        t.write_text("0\n1\n")
        p.write_text("0\n")
        assert main(["classify-report", "--true", str(t), "--pred", str(p), "--bins", "2"]) == 2


class TestSimulateCommand:
    def test_writes_expected_files(self, tmp_path, capsys):
        out = tmp_path / "runs"
        code = main(
            ["simulate", "--routes", "straight", "--trials", "1", "--seed", "0", "--out", str(out)]
        )
        assert code == 0
        names = sorted(f.name for f in out.iterdir())
        assert names == [
            "report.json",
            "trial_straight_corrected_00.csv",
            "trial_straight_uncorrected_00.csv",
        ]
        doc = json.loads((out / "report.json").read_text())
        assert set(doc["routes"]["straight"]) == {"corrected", "uncorrected"}
        assert set(doc["overall"]) == {"corrected", "uncorrected"}

    def test_file_count_formula(self, tmp_path):
        out = tmp_path / "runs"
        main(
            [
                "simulate",
                "--routes",
                "straight,one-turn",
                "--trials",
                "2",
                "--seed",
                "1",
                "--out",
                str(out),
            ]
        )
        csvs = [f for f in out.iterdir() if f.suffix == ".csv"]
        assert len(csvs) == 2 * 2 * 2  # routes x modes x trials

    def test_no_correction_flag(self, tmp_path):
        out = tmp_path / "runs"
        main(
            [
                "simulate",
                "--routes",
                "straight",
                "--trials",
                "1",
                "--no-correction",
                "--out",
                str(out),
            ]
        )
        names = sorted(f.name for f in out.iterdir())
        assert names == ["report.json", "trial_straight_uncorrected_00.csv"]
        doc = json.loads((out / "report.json").read_text())
        assert list(doc["overall"]) == ["uncorrected"]

    def test_byte_identical_reruns(self, tmp_path):
        args = ["simulate", "--routes", "straight", "--trials", "2", "--seed", "3"]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        files_a = sorted(f.name for f in out_a.iterdir())
        assert files_a == sorted(f.name for f in out_b.iterdir())
        for name in files_a:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_unknown_route_is_input_error(self, tmp_path, capsys):
        code = main(["simulate", "--routes", "zigzag", "--out", str(tmp_path / "x")])
        assert code == 2
        assert "zigzag" in capsys.readouterr().err

    def test_unwritable_out_is_environment_error(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("not a directory")
        code = main(
            [
                "simulate",
                "--routes",
                "straight",
                "--trials",
                "1",
                "--out",
                str(blocker / "sub"),
            ]
        )
        assert code == 3

    def test_fault_rate_zero_tracks_expert(self, tmp_path):
        out = tmp_path / "runs"
        main(
            [
                "simulate",
                "--routes",
                "straight",
                "--trials",
                "1",
                "--fault-rate",
                "0",
                "--reg-noise",
                "0",
                "--out",
                str(out),
            ]
        )
        doc = json.loads((out / "report.json").read_text())
        for mode in ("corrected", "uncorrected"):
            assert doc["routes"]["straight"][mode]["mean"]["frechet"] < 0.5


class TestTopLevel:
    def test_requires_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
