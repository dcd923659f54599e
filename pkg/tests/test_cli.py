import json

import numpy as np
import pytest

from prnuvid import imaging
from prnuvid.cli import main
from prnuvid.fingerprint import MAGIC


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    """Small synthetic dataset generated through the CLI itself."""
    root = tmp_path_factory.mktemp("clids")
    out = root / "ds"
    rc = main([
        "synth", "--out", str(out), "--cameras", "3", "--frames", "12",
        "--tests", "1", "--rows", "32", "--cols", "32",
        "--strength", "0.05", "--sigma-add", "1.0", "--seed", "21", "--rate", "3",
    ])
    assert rc == 0
    return out


class TestSynth:
    def test_writes_manifest_and_frames(self, dataset):
        manifest = json.loads((dataset / "manifest.json").read_text())
        assert len(manifest["cameras"]) == 3
        assert (dataset / "cam01" / "train" / "frame_000000.png").exists()


class TestEnroll:
    def test_writes_fingerprint_files(self, dataset, capsys):
        rc = main(["enroll", "--manifest", str(dataset / "manifest.json"),
                   "--out", str(dataset / "fps"), "--rate", "3"])
        assert rc == 0
        files = sorted((dataset / "fps").glob("*.fp"))
        assert [f.name for f in files] == ["cam01.fp", "cam02.fp", "cam03.fp"]
        for f in files:
            assert f.read_bytes()[:8] == MAGIC

    def test_rerun_is_byte_identical(self, dataset):
        args = ["enroll", "--manifest", str(dataset / "manifest.json"),
                "--out", str(dataset / "fps2"), "--rate", "3"]
        assert main(args) == 0
        first = {p.name: p.read_bytes() for p in (dataset / "fps2").glob("*.fp")}
        assert main(args) == 0
        second = {p.name: p.read_bytes() for p in (dataset / "fps2").glob("*.fp")}
        assert first == second

    def test_sampling_arithmetic_recorded(self, dataset):
        # 12 training frames at rate 3: select keeps 4, averaging keeps 4 blocks
        from prnuvid.fingerprint import load_fingerprint

        assert main(["enroll", "--manifest", str(dataset / "manifest.json"),
                     "--out", str(dataset / "fps_sel"), "--rate", "3"]) == 0
        assert main(["enroll", "--manifest", str(dataset / "manifest.json"),
                     "--out", str(dataset / "fps_avg"), "--rate", "3",
                     "--average", "train"]) == 0
        sel = load_fingerprint(dataset / "fps_sel" / "cam01.fp")
        avg = load_fingerprint(dataset / "fps_avg" / "cam01.fp")
        assert sel.frame_count == 4
        assert avg.frame_count == 4
        assert not np.array_equal(sel.matrix, avg.matrix)


@pytest.fixture(scope="module")
def fingerprints(dataset):
    main(["enroll", "--manifest", str(dataset / "manifest.json"),
          "--out", str(dataset / "fpid"), "--rate", "3"])
    return dataset / "fpid"


@pytest.mark.usefixtures("fingerprints")
class TestIdentify:

    def test_training_video_identifies_its_camera(self, dataset, capsys):
        for cam in ("cam01", "cam02", "cam03"):
            rc = main(["identify", "--fingerprints", str(dataset / "fpid"),
                       "--video", str(dataset / cam / "train"),
                       "--method", "voting", "--rate", "3"])
            assert rc == 0
            payload = json.loads(capsys.readouterr().out)
            assert payload["predicted"] == cam
            assert payload["frames_used"] == 4
            assert payload["cameras"] == ["cam01", "cam02", "cam03"]

    def test_config_echo(self, dataset, capsys):
        rc = main(["identify", "--fingerprints", str(dataset / "fpid"),
                   "--video", str(dataset / "cam02" / "test_00"),
                   "--method", "pcevec", "--normalize", "--rate", "4"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["config"]["normalize"] is True
        assert payload["config"]["rate"] == 4
        assert payload["method"] == "pcevec"

    def test_empty_video_dir_exit_2(self, dataset, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        rc = main(["identify", "--fingerprints", str(dataset / "fpid"),
                   "--video", str(empty), "--method", "voting"])
        assert rc == 2
        assert "no frames found" in capsys.readouterr().err

    def test_missing_video_dir_exit_2(self, dataset, capsys):
        rc = main(["identify", "--fingerprints", str(dataset / "fpid"),
                   "--video", str(dataset / "nothere"), "--method", "voting"])
        assert rc == 2

    def test_incompatible_resolution_exit_3(self, dataset, tmp_path, capsys):
        small = tmp_path / "small"
        small.mkdir()
        imaging.save_frame(small / "frame_000000.png", np.full((16, 16), 80.0))
        rc = main(["identify", "--fingerprints", str(dataset / "fpid"),
                   "--video", str(small), "--method", "voting"])
        assert rc == 3
        assert "smaller than the enrollment" in capsys.readouterr().err

    def test_fewer_than_two_fingerprints_exit_3(self, dataset, tmp_path, capsys):
        solo = tmp_path / "solo"
        solo.mkdir()
        (solo / "cam01.fp").write_bytes((dataset / "fpid" / "cam01.fp").read_bytes())
        rc = main(["identify", "--fingerprints", str(solo),
                   "--video", str(dataset / "cam01" / "test_00"),
                   "--method", "voting"])
        assert rc == 3

    def test_no_fingerprints_exit_2(self, dataset, tmp_path):
        empty = tmp_path / "nofp"
        empty.mkdir()
        rc = main(["identify", "--fingerprints", str(empty),
                   "--video", str(dataset / "cam01" / "test_00"),
                   "--method", "voting"])
        assert rc == 2


class TestEvaluate:
    def test_report_to_stdout(self, dataset, capsys):
        rc = main(["evaluate", "--manifest", str(dataset / "manifest.json"),
                   "--method", "voting", "--rate", "3"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["error_pct"] == 0.0
        assert payload["confusion_matrix"] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_report_to_file(self, dataset, tmp_path, capsys):
        out = tmp_path / "report.json"
        rc = main(["evaluate", "--manifest", str(dataset / "manifest.json"),
                   "--method", "patcorr", "--rate", "3", "--out", str(out)])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["method"] == "patcorr"

    def test_missing_manifest_exit_2(self, tmp_path, capsys):
        rc = main(["evaluate", "--manifest", str(tmp_path / "nope.json"),
                   "--method", "voting"])
        assert rc == 2


class TestSweep:
    def test_writes_json_and_csv(self, dataset, tmp_path, capsys):
        out = tmp_path / "sweepout"
        rc = main(["sweep", "--manifest", str(dataset / "manifest.json"),
                   "--rates", "4,3", "--methods", "all", "--out", str(out)])
        assert rc == 0
        data = json.loads((out / "sweep.json").read_text())
        assert data["rates"] == [4, 3]
        assert data["methods"] == ["voting", "patcorr", "pcevec"]
        assert len(data["rows"]) == 6
        csv_lines = (out / "sweep.csv").read_text().strip().splitlines()
        assert csv_lines[0] == "rate,method,test,error_pct"
        assert len(csv_lines) == 7

    def test_bad_rates_exit_2(self, dataset, capsys):
        rc = main(["sweep", "--manifest", str(dataset / "manifest.json"),
                   "--rates", "four"])
        assert rc == 2

    def test_bad_method_exit_2(self, dataset, capsys):
        rc = main(["sweep", "--manifest", str(dataset / "manifest.json"),
                   "--methods", "voting,nearest"])
        assert rc == 2
