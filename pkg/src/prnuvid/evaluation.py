"""Evaluation harness: confusion matrices, success/error rates, sampling-rate
sweeps, and the train/run averaging configuration matrix.

Reports are written as JSON (confusion matrices and rates) plus a flat CSV
(rate, method, test, error_pct) suitable for plotting error-vs-rate curves.
Percentages are rounded to two decimals only at the output layer; internal
values keep full precision.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import correlation, denoise, fingerprint, identify, imaging, pipeline, sampling
from .errors import InputDataError
from .manifest import DatasetManifest, TestEntry

METHOD_CHOICES = identify.METHODS


@dataclass
class ConfusionMatrix:
    """counts[i][j] = number of class-i test videos predicted as class j;
    row order is the enrollment order."""

    labels: list[str]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_matrix(truths: list[str], predictions: list[str],
                     labels: list[str]) -> ConfusionMatrix:
    if len(truths) != len(predictions):
        raise ValueError(
            f"length mismatch: {len(truths)} truths vs {len(predictions)} predictions"
        )
    if not truths:
        raise ValueError("no test samples")
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for truth, pred in zip(truths, predictions):
        if truth not in index:
            raise ValueError(f"unknown label {truth!r}")
        if pred not in index:
            raise ValueError(f"unknown label {pred!r}")
        counts[index[truth], index[pred]] += 1
    return ConfusionMatrix(labels=list(labels), counts=counts)


def success_rate(cm: ConfusionMatrix) -> float:
    """Percentage of test videos on the diagonal."""
    total = cm.total
    if total == 0:
        raise ValueError("empty confusion matrix")
    return 100.0 * float(np.trace(cm.counts)) / total


def error_rate(cm: ConfusionMatrix) -> float:
    # Derived from success_rate so p + q == 100 holds exactly.
    return 100.0 - success_rate(cm)


@dataclass
class EvaluationReport:
    method: str
    rate: int
    average_train: bool
    average_run: bool
    sigma0: float
    cm: ConfusionMatrix
    per_video: list[dict]

    @property
    def success_pct(self) -> float:
        return success_rate(self.cm)

    @property
    def error_pct(self) -> float:
        return error_rate(self.cm)

    def to_json_dict(self, man: DatasetManifest, threads: int = 1) -> dict:
        return {
            "command": "evaluate",
            "manifest": str(man.path),
            "seed": man.seed,
            "method": self.method,
            "rate": self.rate,
            "average": {"train": self.average_train, "run": self.average_run},
            "sigma0": self.sigma0,
            "threads": threads,
            "labels": self.cm.labels,
            "confusion_matrix": self.cm.counts.tolist(),
            "total_videos": self.cm.total,
            "success_pct": round(self.success_pct, 2),
            "error_pct": round(self.error_pct, 2),
            "per_video": self.per_video,
        }


def _scored_tests(man: DatasetManifest) -> list[TestEntry]:
    tests = [t for t in man.tests if t.true_id is not None]
    if not tests:
        raise InputDataError("manifest has no test entries with a true_id to score against")
    return tests


def _load_harmonized(path, rows: int, cols: int) -> np.ndarray:
    return identify.harmonize_frame(imaging.load_luminance(path), rows, cols)


def run_evaluation(
    man: DatasetManifest,
    method: str,
    rate: int | None = None,
    average_train: bool | None = None,
    average_run: bool | None = None,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    metric: str = "pearson",
    normalize: bool = False,
    modulate: bool = True,
    threads: int = 1,
    registry: identify.Registry | None = None,
) -> EvaluationReport:
    """Enroll (unless a registry is supplied), identify every scored test
    video, and assemble the confusion matrix."""
    rate = man.sampling.rate if rate is None else rate
    average_train = man.sampling.average_train if average_train is None else average_train
    average_run = man.sampling.average_run if average_run is None else average_run
    if registry is None:
        registry = pipeline.build_registry(
            man, rate=rate, average_train=average_train,
            sigma0=sigma0, levels=levels, threads=threads,
        )
    tests = _scored_tests(man)

    def identify_one(test: TestEntry) -> identify.IdentificationResult:
        return pipeline.identify_video(
            test.directory, registry, method=method, rate=rate,
            average=average_run, sigma0=sigma0, levels=levels,
            metric=metric, normalize=normalize, modulate=modulate,
        )

    results = pipeline.map_maybe_parallel(identify_one, tests, threads)
    truths = [t.true_id for t in tests]
    predictions = [r.predicted_id for r in results]
    cm = confusion_matrix(truths, predictions, registry.camera_ids)
    per_video = [
        {
            "dir": str(t.directory),
            "true_id": t.true_id,
            "predicted": r.predicted_id,
            "tie": r.tie,
        }
        for t, r in zip(tests, results)
    ]
    return EvaluationReport(
        method=method, rate=rate, average_train=average_train,
        average_run=average_run, sigma0=sigma0, cm=cm, per_video=per_video,
    )


@dataclass
class SweepRow:
    rate: int
    method: str
    test: str
    error_pct: float


@dataclass
class SweepTable:
    rows: list[SweepRow]
    rates: list[int]
    methods: list[str]
    tests: list[str]
    config: dict = field(default_factory=dict)

    def mean_error_by_method(self) -> dict[str, list[tuple[int, float]]]:
        """Per (method, rate) mean error across test variants."""
        out: dict[str, list[tuple[int, float]]] = {}
        for method in self.methods:
            curve = []
            for rate in self.rates:
                errs = [r.error_pct for r in self.rows
                        if r.method == method and r.rate == rate]
                curve.append((rate, float(np.mean(errs))))
            out[method] = curve
        return out

    def to_json_dict(self) -> dict:
        return {
            "command": "sweep",
            **self.config,
            "rates": self.rates,
            "methods": self.methods,
            "tests": self.tests,
            "rows": [
                {
                    "rate": r.rate,
                    "method": r.method,
                    "test": r.test,
                    "error_pct": round(r.error_pct, 2),
                    "success_pct": round(100.0 - r.error_pct, 2),
                }
                for r in self.rows
            ],
            "mean_error_by_method": {
                m: [{"rate": rate, "mean_error_pct": round(e, 2)} for rate, e in curve]
                for m, curve in self.mean_error_by_method().items()
            },
        }

    def write_json(self, path: str | os.PathLike) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rate", "method", "test", "error_pct"])
            for r in self.rows:
                writer.writerow([r.rate, r.method, r.test, f"{r.error_pct:.2f}"])


class _SelectSweeper:
    """Shared-work sweep over select-mode rates: each needed frame index is
    loaded and denoised once, then feeds every (method, rate) that samples
    it.  Per-rate contributions are applied in ascending frame order, exactly
    as a dedicated run would, so results are identical to uncached runs."""

    def __init__(self, man: DatasetManifest, methods: list[str], rates: list[int],
                 sigma0: float, levels: int, metric: str, normalize: bool,
                 modulate: bool, threads: int):
        self.man = man
        self.methods = methods
        self.rates = rates
        self.sigma0 = sigma0
        self.levels = levels
        self.metric = metric
        self.normalize = normalize
        self.modulate = modulate
        self.threads = threads

    def _union_indices(self, frame_count: int) -> list[int]:
        return sorted({
            i
            for rate in self.rates
            for (i,) in sampling.plan(frame_count, rate, "select").groups
        })

    def _enroll_all_rates(self) -> dict[int, identify.Registry]:
        man = self.man

        def enroll_entry(entry):
            accs = {
                rate: fingerprint.FingerprintAccumulator.empty(man.rows, man.cols)
                for rate in self.rates
            }
            for directory in entry.training_dirs:
                paths = imaging.list_frames(directory)
                for idx in self._union_indices(len(paths)):
                    frame = _load_harmonized(paths[idx], man.rows, man.cols)
                    residual = denoise.extract_residual(frame, self.sigma0, self.levels)
                    estimate = frame - residual
                    num = residual * estimate
                    den = estimate * estimate
                    for rate in self.rates:
                        if idx % rate == 0:
                            acc = accs[rate]
                            acc.numerator += num
                            acc.denominator += den
                            acc.frame_count += 1
            return {
                rate: fingerprint.finalize(acc, entry.camera_id)
                for rate, acc in accs.items()
            }

        per_camera = pipeline.map_maybe_parallel(enroll_entry, man.cameras, self.threads)
        return {
            rate: identify.Registry([fps[rate] for fps in per_camera])
            for rate in self.rates
        }

    def _score_video(self, test: TestEntry,
                     registries: dict[int, identify.Registry]) -> dict[tuple[str, int], str]:
        man = self.man
        need_vectors = "voting" in self.methods or "pcevec" in self.methods
        paths = imaging.list_frames(test.directory)
        winners: dict[int, list[int]] = {rate: [] for rate in self.rates}
        vectors: dict[int, list[np.ndarray]] = {rate: [] for rate in self.rates}
        accs = {
            rate: fingerprint.FingerprintAccumulator.empty(man.rows, man.cols)
            for rate in self.rates
        }
        for idx in self._union_indices(len(paths)):
            frame = _load_harmonized(paths[idx], man.rows, man.cols)
            residual = denoise.extract_residual(frame, self.sigma0, self.levels)
            estimate = frame - residual
            for rate in self.rates:
                if idx % rate != 0:
                    continue
                if need_vectors:
                    reg = registries[rate]
                    scores = np.empty(len(reg))
                    for ci, fp in enumerate(reg.fingerprints):
                        template = fp.matrix * estimate if self.modulate else fp.matrix
                        scores[ci] = correlation.pce(residual, template).pce
                    winners[rate].append(int(np.argmax(scores)))
                    vectors[rate].append(scores)
                if "patcorr" in self.methods:
                    acc = accs[rate]
                    acc.numerator += residual * estimate
                    acc.denominator += estimate * estimate
                    acc.frame_count += 1
        predictions: dict[tuple[str, int], str] = {}
        for method in self.methods:
            for rate in self.rates:
                reg = registries[rate]
                if method == "voting":
                    res = identify.aggregate_votes(winners[rate], reg)
                elif method == "pcevec":
                    res = identify.aggregate_pce_vectors(vectors[rate], reg, self.normalize)
                else:
                    query = fingerprint.finalize(accs[rate], "query")
                    res = identify.compare_pattern(query, reg, self.metric)
                predictions[(method, rate)] = res.predicted_id
        return predictions

    def run(self) -> dict[tuple[str, int], ConfusionMatrix]:
        registries = self._enroll_all_rates()
        tests = _scored_tests(self.man)
        all_preds = pipeline.map_maybe_parallel(
            lambda t: self._score_video(t, registries), tests, self.threads
        )
        truths = [t.true_id for t in tests]
        labels = [c.camera_id for c in self.man.cameras]
        out = {}
        for method in self.methods:
            for rate in self.rates:
                preds = [p[(method, rate)] for p in all_preds]
                out[(method, rate)] = confusion_matrix(truths, preds, labels)
        return out


def evaluate_grid(
    man: DatasetManifest,
    methods: list[str],
    rates: list[int],
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    metric: str = "pearson",
    normalize: bool = False,
    modulate: bool = True,
    average_train: bool | None = None,
    average_run: bool | None = None,
    threads: int = 1,
) -> dict[tuple[str, int], ConfusionMatrix]:
    """Confusion matrix for every (method, rate) combination.

    Select-mode grids share residual work: each sampled frame is loaded and
    denoised once and feeds every combination that uses it.  Averaging-mode
    grids fall back to independent evaluations per rate (block contents
    differ between rates).
    """
    if not rates:
        raise ValueError("rates must be non-empty")
    if not methods:
        raise ValueError("methods must be non-empty")
    for m in methods:
        if m not in METHOD_CHOICES:
            raise ValueError(f"unknown method {m!r}")
    avg_train = man.sampling.average_train if average_train is None else average_train
    avg_run = man.sampling.average_run if average_run is None else average_run
    if not avg_train and not avg_run:
        return _SelectSweeper(
            man, methods, rates, sigma0, levels, metric,
            normalize, modulate, threads,
        ).run()
    out: dict[tuple[str, int], ConfusionMatrix] = {}
    for rate in rates:
        registry = pipeline.build_registry(
            man, rate=rate, average_train=avg_train,
            sigma0=sigma0, levels=levels, threads=threads,
        )
        for method in methods:
            report = run_evaluation(
                man, method, rate=rate, average_train=avg_train,
                average_run=avg_run, sigma0=sigma0, levels=levels,
                metric=metric, normalize=normalize, modulate=modulate,
                threads=threads, registry=registry,
            )
            out[(method, rate)] = report.cm
    return out


def sweep(
    manifests: list[tuple[str, DatasetManifest]],
    methods: list[str],
    rates: list[int],
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    metric: str = "pearson",
    normalize: bool = False,
    modulate: bool = True,
    average_train: bool | None = None,
    average_run: bool | None = None,
    threads: int = 1,
) -> SweepTable:
    """Run every (method, rate) combination over each manifest's test set.

    Output is deterministic for a fixed manifest set and configuration.
    """
    rows: list[SweepRow] = []
    for label, man in manifests:
        cms = evaluate_grid(
            man, methods, rates, sigma0=sigma0, levels=levels, metric=metric,
            normalize=normalize, modulate=modulate,
            average_train=average_train, average_run=average_run, threads=threads,
        )
        for method in methods:
            for rate in rates:
                rows.append(SweepRow(rate, method, label, error_rate(cms[(method, rate)])))
    return SweepTable(
        rows=rows,
        rates=list(rates),
        methods=list(methods),
        tests=[label for label, _ in manifests],
        config={
            "manifests": {label: str(man.path) for label, man in manifests},
            "seeds": {label: man.seed for label, man in manifests},
            "sigma0": sigma0,
            "threads": threads,
        },
    )


AVERAGING_COMBOS = ((False, False), (True, False), (False, True), (True, True))


def averaging_matrix(
    man: DatasetManifest,
    method: str = "voting",
    rate: int = 15,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    threads: int = 1,
) -> list[dict]:
    """Error rate for each train/run averaging combination at a fixed rate,
    in the order NO/NO, YES/NO, NO/YES, YES/YES.  Enrollments are shared
    between rows with the same train flag."""
    registries: dict[bool, identify.Registry] = {}
    rows = []
    for avg_train, avg_run in AVERAGING_COMBOS:
        if avg_train not in registries:
            registries[avg_train] = pipeline.build_registry(
                man, rate=rate, average_train=avg_train,
                sigma0=sigma0, levels=levels, threads=threads,
            )
        report = run_evaluation(
            man, method, rate=rate, average_train=avg_train, average_run=avg_run,
            sigma0=sigma0, levels=levels, threads=threads,
            registry=registries[avg_train],
        )
        rows.append({
            "average_train": avg_train,
            "average_run": avg_run,
            "error_pct": report.error_pct,
        })
    return rows
