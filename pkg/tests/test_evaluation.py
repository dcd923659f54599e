import json

import numpy as np
import pytest

from prnuvid import evaluation, pipeline, synthcam
from prnuvid.evaluation import (
    ConfusionMatrix,
    averaging_matrix,
    confusion_matrix,
    error_rate,
    run_evaluation,
    success_rate,
    sweep,
)
from prnuvid.manifest import parse_manifest


@pytest.fixture(scope="module")
def tiny_manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("tinyds")
    path = synthcam.write_dataset(
        root, cameras=3, frames=12, tests_per_camera=2,
        rows=32, cols=32, strength=0.05, sigma_add=1.0, seed=21, rate=3,
    )
    return parse_manifest(path)


class TestConfusionMatrix:
    def test_perfect_predictions_are_diagonal(self):
        labels = ["a", "b", "c"]
        truths = ["a", "b", "c", "b"]
        cm = confusion_matrix(truths, truths, labels)
        assert np.trace(cm.counts) == 4
        assert cm.counts.sum() == 4
        np.testing.assert_array_equal(cm.counts, np.diag([1, 2, 1]))

    def test_141_videos_with_3_errors(self):
        # 141 test videos, 138 correct -> off-diagonal sum 3
        labels = ["p1", "p2", "p3", "p4"]
        truths = ["p1"] * 36 + ["p2"] * 35 + ["p3"] * 35 + ["p4"] * 35
        preds = list(truths)
        preds[0], preds[40], preds[80] = "p2", "p3", "p4"
        cm = confusion_matrix(truths, preds, labels)
        assert cm.total == 141
        assert cm.total - int(np.trace(cm.counts)) == 3

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="no test samples"):
            confusion_matrix([], [], ["a"])

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError, match="unknown label"):
            confusion_matrix(["x"], ["a"], ["a"])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length mismatch"):
            confusion_matrix(["a"], ["a", "a"], ["a"])


class TestRates:
    def test_identity_matrix_rates(self):
        cm = ConfusionMatrix(["a", "b"], np.diag([5, 5]))
        assert success_rate(cm) == 100.0
        assert error_rate(cm) == 0.0

    def test_error_rounding_at_141_videos(self):
        counts = np.diag([35, 35, 34, 34])
        counts[0, 1] = 1
        counts[1, 2] = 1
        counts[2, 3] = 1
        cm = ConfusionMatrix(["p1", "p2", "p3", "p4"], counts)
        assert cm.total == 141
        q = error_rate(cm)
        assert round(q, 2) == 2.13
        assert success_rate(cm) + q == 100.0

    def test_table_iii_rate_example(self):
        # 35 test videos with 32 correct -> 8.57 % error
        cm = ConfusionMatrix(["a", "b"], np.array([[32, 3], [0, 0]]))
        assert round(error_rate(cm), 2) == 8.57

    def test_p_plus_q_exact_over_many_totals(self):
        for total in range(1, 400):
            for wrong in (0, 1, total // 3, total - 1):
                if wrong > total:
                    continue
                counts = np.array([[total - wrong, wrong], [0, 0]])
                cm = ConfusionMatrix(["a", "b"], counts)
                assert success_rate(cm) + error_rate(cm) == 100.0

    def test_empty_total_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            success_rate(ConfusionMatrix(["a"], np.zeros((1, 1), dtype=np.int64)))


class TestRunEvaluation:
    def test_perfect_on_tiny_dataset(self, tiny_manifest):
        report = run_evaluation(tiny_manifest, "voting", rate=3)
        assert report.error_pct == 0.0
        assert report.cm.total == 6
        np.testing.assert_array_equal(report.cm.counts, np.diag([2, 2, 2]))
        assert all(v["predicted"] == v["true_id"] for v in report.per_video)

    def test_json_report_shape(self, tiny_manifest):
        report = run_evaluation(tiny_manifest, "pcevec", rate=4)
        payload = report.to_json_dict(tiny_manifest, threads=1)
        assert payload["method"] == "pcevec"
        assert payload["labels"] == ["cam01", "cam02", "cam03"]
        assert payload["success_pct"] + payload["error_pct"] == 100.0
        assert len(payload["per_video"]) == 6
        json.dumps(payload)  # serializable

    def test_threads_match_sequential(self, tiny_manifest):
        seq = run_evaluation(tiny_manifest, "voting", rate=3, threads=1)
        par = run_evaluation(tiny_manifest, "voting", rate=3, threads=4)
        np.testing.assert_array_equal(seq.cm.counts, par.cm.counts)


class TestSweep:
    def test_matches_independent_runs(self, tiny_manifest):
        table = sweep([("tiny", tiny_manifest)], ["voting", "patcorr", "pcevec"], [4, 3])
        for row in table.rows:
            independent = run_evaluation(tiny_manifest, row.method, rate=row.rate)
            assert row.error_pct == independent.error_pct

    def test_total_invariant_across_methods(self, tiny_manifest):
        cms = evaluation.evaluate_grid(tiny_manifest, ["voting", "patcorr", "pcevec"], [3])
        totals = {cm.total for cm in cms.values()}
        assert totals == {6}

    def test_row_order_and_mean(self, tiny_manifest):
        table = sweep([("tiny", tiny_manifest)], ["voting", "pcevec"], [4, 3])
        keys = [(r.method, r.rate, r.test) for r in table.rows]
        assert keys == [
            ("voting", 4, "tiny"), ("voting", 3, "tiny"),
            ("pcevec", 4, "tiny"), ("pcevec", 3, "tiny"),
        ]
        mean = table.mean_error_by_method()
        assert set(mean) == {"voting", "pcevec"}
        assert [r for r, _ in mean["voting"]] == [4, 3]

    def test_deterministic_outputs(self, tiny_manifest, tmp_path):
        outs = []
        for name in ("one", "two"):
            table = sweep([("tiny", tiny_manifest)], ["voting"], [4])
            jpath = tmp_path / f"{name}.json"
            cpath = tmp_path / f"{name}.csv"
            table.write_json(jpath)
            table.write_csv(cpath)
            outs.append((jpath.read_bytes(), cpath.read_bytes()))
        assert outs[0] == outs[1]

    def test_csv_header_and_rounding(self, tiny_manifest, tmp_path):
        table = sweep([("tiny", tiny_manifest)], ["voting"], [4])
        path = tmp_path / "s.csv"
        table.write_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "rate,method,test,error_pct"
        rate, method, test, err = lines[1].split(",")
        assert (rate, method, test) == ("4", "voting", "tiny")
        float(err)

    def test_average_mode_sweep(self, tiny_manifest):
        table = sweep([("tiny", tiny_manifest)], ["voting"], [3],
                      average_train=False, average_run=True)
        assert len(table.rows) == 1
        # run-averaging on the tiny set should also be perfect
        assert table.rows[0].error_pct == 0.0

    def test_rejects_empty_grid(self, tiny_manifest):
        with pytest.raises(ValueError):
            sweep([("t", tiny_manifest)], [], [3])
        with pytest.raises(ValueError):
            sweep([("t", tiny_manifest)], ["voting"], [])
        with pytest.raises(ValueError, match="unknown method"):
            sweep([("t", tiny_manifest)], ["knn"], [3])


class TestAveragingMatrix:
    def test_four_rows_in_table_order(self, tiny_manifest):
        rows = averaging_matrix(tiny_manifest, method="voting", rate=3)
        combos = [(r["average_train"], r["average_run"]) for r in rows]
        assert combos == [(False, False), (True, False), (False, True), (True, True)]
        for r in rows:
            assert 0.0 <= r["error_pct"] <= 100.0


class TestRegistryReuse:
    def test_shared_registry_matches_fresh(self, tiny_manifest):
        registry = pipeline.build_registry(tiny_manifest, rate=3)
        with_reg = run_evaluation(tiny_manifest, "voting", rate=3, registry=registry)
        fresh = run_evaluation(tiny_manifest, "voting", rate=3)
        np.testing.assert_array_equal(with_reg.cm.counts, fresh.cm.counts)
