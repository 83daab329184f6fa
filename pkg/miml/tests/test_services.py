import json
import tempfile
from pathlib import Path
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase, TestCase

from ..core import Bag, Case, LabelSet, MIMLDataset
from ..enums import Algorithm, ResultStatus, RunStatus
from ..exceptions import DatasetFormatError, DatasetValidationError, InvalidArgument
from ..features import RgbImage, write_image
from ..learners import MimlKnnParams, predict_many, train_miml_knn
from ..metrics import EvalReport
from ..models import BenchRun
from ..services import (
    BenchReport,
    BenchRow,
    SynthConfig,
    class_centers,
    dataset_fingerprint,
    emit_eval_report,
    emit_report,
    evaluate_scores,
    extract_dataset,
    generate_synthetic,
    load_dataset,
    parse_report_csv,
    read_scores,
    record_benchmark,
    report_from_run,
    resolve_algorithms,
    run_benchmark,
    save_dataset,
    stratified_split,
    write_scores,
)
from ..tasks import run_benchmark_task
from .fixtures import easy_dataset, make_dataset

EASY_KNN = {"mimlknn": {"r": "3", "c": "3"}}


def _report(hl=0.2034, oe=0.15, rl=0.1, cov=1.2, ap=0.8) -> EvalReport:
    names = ("hamming_loss", "one_error", "ranking_loss", "coverage", "average_precision")
    return EvalReport(hl, oe, rl, cov, ap, cases_used={name: 10 for name in names})


class DatasetIoTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / "easy"

    def test_round_trip_is_exact(self):
        original = generate_synthetic(SynthConfig(n_bags=20, n_labels=3, dim=4), seed=3)
        save_dataset(original, self.path)
        loaded = load_dataset(self.path)
        self.assertEqual(loaded.manifest, original.manifest)
        self.assertEqual(dataset_fingerprint(loaded), dataset_fingerprint(original))
        for a, b in zip(loaded.cases, original.cases):
            self.assertEqual(a, b)

    def test_bad_line_names_its_position(self):
        save_dataset(easy_dataset(), self.path)
        lines = (self.path / "cases.jsonl").read_text().splitlines()
        lines[1] = lines[1].replace('"instances": [', '"instances": [[], ')
        (self.path / "cases.jsonl").write_text("\n".join(lines) + "\n")
        with self.assertRaisesRegex(DatasetFormatError, r"cases\.jsonl:2:"):
            load_dataset(self.path)

    def test_undecodable_line_names_its_position(self):
        save_dataset(easy_dataset(), self.path)
        with open(self.path / "cases.jsonl", "ab") as fh:
            fh.write(b'{"case_id": "\xff\xfe"}\n')
        with self.assertRaisesRegex(DatasetFormatError, r"cases\.jsonl:13:"):
            load_dataset(self.path)

    def test_fractional_label_is_rejected(self):
        save_dataset(easy_dataset(), self.path)
        cases = self.path / "cases.jsonl"
        text = cases.read_text()
        self.assertIn('"labels": [0]', text.splitlines()[0])
        cases.write_text(text.replace('"labels": [0]', '"labels": [0.5]', 1))
        with self.assertRaisesRegex(DatasetFormatError, r"cases\.jsonl:1:.*not an integer"):
            load_dataset(self.path)

    def test_violations_are_reported(self):
        d = easy_dataset()
        duplicated = MIMLDataset(d.manifest, d.cases + (d.cases[0],))
        save_dataset(duplicated, self.path)
        with self.assertRaises(DatasetValidationError) as ctx:
            load_dataset(self.path)
        self.assertIn("upper-0", str(ctx.exception))
        self.assertEqual(len(ctx.exception.violations), 1)

    def test_empty_cases_file(self):
        d = easy_dataset()
        save_dataset(MIMLDataset(d.manifest, ()), self.path)
        self.assertEqual(len(load_dataset(self.path)), 0)

    def test_missing_or_broken_manifest(self):
        with self.assertRaises(DatasetFormatError):
            load_dataset(self.path)
        self.path.mkdir()
        (self.path / "manifest.json").write_text(json.dumps({"dim": 2}))
        with self.assertRaises(DatasetFormatError):
            load_dataset(self.path)


class SplitTests(SimpleTestCase):
    def setUp(self):
        self.dataset = generate_synthetic(SynthConfig(n_bags=120, n_labels=4, dim=3), seed=1)

    def test_partition_and_fraction(self):
        result = stratified_split(self.dataset, 0.75, seed=0)
        train_ids = {c.case_id for c in result.train.cases}
        test_ids = {c.case_id for c in result.test.cases}
        self.assertFalse(train_ids & test_ids)
        self.assertEqual(len(train_ids) + len(test_ids), 120)
        self.assertAlmostEqual(len(train_ids) / 120, 0.75, delta=0.05)
        self.assertEqual(result.dropped, 0)

    def test_every_label_on_both_sides(self):
        result = stratified_split(self.dataset, 0.5, seed=4)
        totals = self.dataset.label_matrix().sum(axis=0)
        train_counts = result.train.label_matrix().sum(axis=0)
        for total, on_train in zip(totals, train_counts):
            self.assertGreater(on_train, 0)
            self.assertLess(on_train, total)
            self.assertLessEqual(abs(on_train - total / 2), 1)

    def test_twenty_positives_split_in_half(self):
        sets = [[0, 1]] * 8 + [[0]] * 12 + [[1]] * 12 + [[2]] * 20
        dataset = make_dataset([[[float(i)]] for i in range(len(sets))], sets)
        for seed in range(5):
            train_counts = stratified_split(dataset, 0.5, seed=seed).train.label_matrix().sum(axis=0)
            for on_train in train_counts:
                self.assertLessEqual(abs(on_train - 10), 1)

    def test_seeded(self):
        a = stratified_split(self.dataset, 0.6, seed=9)
        b = stratified_split(self.dataset, 0.6, seed=9)
        self.assertEqual([c.case_id for c in a.train.cases], [c.case_id for c in b.train.cases])

    def test_unlabelled_cases_dropped(self):
        d = easy_dataset()
        blank = Case("blank", "fixture", Bag([[0.0, 0.0]]), LabelSet.of([], 2))
        result = stratified_split(MIMLDataset(d.manifest, d.cases + (blank,)), 0.5)
        self.assertEqual(result.dropped, 1)
        self.assertEqual(len(result.train) + len(result.test), 12)

    def test_bad_fraction(self):
        for frac in (0.0, 1.0, 1.5):
            with self.assertRaises(InvalidArgument):
                stratified_split(self.dataset, frac)


class SyntheticTests(SimpleTestCase):
    def test_seed_decides_everything(self):
        cfg = SynthConfig(n_bags=30, n_labels=3, dim=2)
        self.assertEqual(
            dataset_fingerprint(generate_synthetic(cfg, 5)), dataset_fingerprint(generate_synthetic(cfg, 5))
        )
        self.assertNotEqual(
            dataset_fingerprint(generate_synthetic(cfg, 5)), dataset_fingerprint(generate_synthetic(cfg, 6))
        )

    def test_bag_shape_follows_labels(self):
        cfg = SynthConfig(n_bags=50, n_labels=5, dim=3, instances_per_label=2, background_instances=1)
        for case in generate_synthetic(cfg, 0).cases:
            self.assertGreaterEqual(len(case.labels), 1)
            self.assertEqual(len(case.bag), 2 * len(case.labels) + 1)

    def test_label_marginals(self):
        cfg = SynthConfig(n_bags=2000, n_labels=5, dim=2)
        observed = generate_synthetic(cfg, 11).label_matrix().mean(axis=0)
        np.testing.assert_allclose(observed, cfg.label_marginals(), atol=0.05)

    def test_centers_are_separated(self):
        centers = class_centers(20, 4, 5.0)
        points = np.vstack([centers, np.zeros((1, 4))])
        gaps = np.linalg.norm(points[:, None] - points[None, :], axis=2)
        np.fill_diagonal(gaps, np.inf)
        self.assertGreaterEqual(gaps.min(), 5.0)

    def test_bad_config(self):
        with self.assertRaises(InvalidArgument):
            SynthConfig(n_bags=0)
        with self.assertRaises(InvalidArgument):
            SynthConfig(n_labels=2, cardinality=(0.5, 0.6))


class BenchmarkTests(SimpleTestCase):
    def test_easy_dataset_knn(self):
        d = easy_dataset()
        report = run_benchmark(d, d, algorithms="mimlknn", params=EASY_KNN, seed=0)
        (row,) = report.rows
        self.assertTrue(row.ok)
        self.assertEqual(row.algorithm, "mimlknn")
        self.assertEqual(row.params["r"], 3)
        self.assertEqual(row.report.average_precision, 1.0)
        self.assertEqual(row.report.cases_used["average_precision"], 12)

    def test_failing_algorithm_becomes_failed_row(self):
        d = easy_dataset()

        def boom(*args, **kwargs):
            raise RuntimeError("solver exploded")

        with patch.dict("miml.services.benchmark.TRAINERS", {Algorithm.MIMLRBF: boom}):
            report = run_benchmark(d, d, algorithms=["mimlrbf", "mimlknn"], params=EASY_KNN)
        self.assertEqual([r.algorithm for r in report.rows], ["mimlknn", "mimlrbf"])
        self.assertTrue(report.rows[0].ok)
        self.assertFalse(report.rows[1].ok)
        self.assertEqual(report.rows[1].error, "RuntimeError: solver exploded")

    def test_bad_param_fails_only_that_row(self):
        d = easy_dataset()
        report = run_benchmark(d, d, algorithms="mimlknn,mimlrbf", params={"mimlknn": {"r": "50"}})
        self.assertFalse(report.rows[0].ok)
        self.assertTrue(report.rows[1].ok)

    def test_workers_do_not_change_rows(self):
        d = easy_dataset()
        serial = run_benchmark(d, d, algorithms="mimlknn,mimlrbf,mimlsvm", params=EASY_KNN, workers=1)
        pooled = run_benchmark(d, d, algorithms="mimlknn,mimlrbf,mimlsvm", params=EASY_KNN, workers=3)
        self.assertEqual(emit_report(serial), emit_report(pooled))

    def test_manifests_must_agree(self):
        d = easy_dataset()
        other = generate_synthetic(SynthConfig(n_bags=5, n_labels=2, dim=3), seed=0)
        with self.assertRaises(DatasetValidationError):
            run_benchmark(d, other)

    def test_resolve_algorithms(self):
        self.assertEqual(resolve_algorithms("all"), list(Algorithm))
        self.assertEqual(resolve_algorithms("kisar,mimlknn"), [Algorithm.MIMLKNN, Algorithm.KISAR])
        with self.assertRaises(InvalidArgument):
            resolve_algorithms("mimlknn,svm")

    def test_every_algorithm_on_synthetic_data(self):
        cfg = SynthConfig(n_bags=80, n_labels=3, dim=4)
        data = generate_synthetic(cfg, seed=0)
        split = stratified_split(data, 0.7, seed=0)
        report = run_benchmark(
            split.train, split.test, params={"mimlboost": {"rounds": "3"}, "m3miml": {"max_iters": "300"}}
        )
        self.assertEqual([r.algorithm for r in report.rows], list(Algorithm.values))
        for row in report.rows:
            with self.subTest(algorithm=row.algorithm):
                self.assertTrue(row.ok, row.error)
                for value in row.report.values():
                    self.assertTrue(np.isfinite(value))

    def test_default_synthetic_benchmark_quality(self):
        # 200 train / 200 test bags, 5 labels, dim 8, sigma 0.5, separation 5
        cfg = SynthConfig()
        train = generate_synthetic(cfg, seed=1)
        test = generate_synthetic(cfg, seed=2)
        report = run_benchmark(train, test, seed=0)
        rows = {row.algorithm: row for row in report.rows}
        self.assertEqual(list(rows), list(Algorithm.values))
        for algo, row in rows.items():
            with self.subTest(algorithm=algo):
                self.assertTrue(row.ok, row.error)
                self.assertGreaterEqual(row.report.average_precision, 0.85)
                self.assertLessEqual(row.report.hamming_loss, 0.15)
        self.assertGreaterEqual(rows[Algorithm.MIMLKNN].report.average_precision, 0.95)
        self.assertGreaterEqual(rows[Algorithm.MIMLSVM].report.average_precision, 0.95)


class ReportTests(SimpleTestCase):
    def setUp(self):
        self.report = BenchReport(
            rows=(
                BenchRow("mimlknn", {"r": 10, "c": 20}, 0, _report(), 0.25),
                BenchRow("mimlrbf", {"alpha": 0.1}, 0, None, 0.01, "RuntimeError: nope"),
            ),
            seed=0,
        )

    def test_text_table(self):
        lines = emit_report(self.report).decode().splitlines()
        self.assertEqual(lines[0], "Algorithms  h.l.  o.e.  r.l.   co.  a.p.")
        self.assertEqual(lines[1], "MIML-kNN   0.203 0.150 0.100 1.200 0.800")
        self.assertEqual(lines[2], "MIMLRBF        -     -     -     -     -")

    def test_csv_parses_back(self):
        again = parse_report_csv(emit_report(self.report, "csv"))
        self.assertEqual(again, self.report)

    def test_csv_missing_columns(self):
        with self.assertRaises(DatasetFormatError):
            parse_report_csv("algorithm,status\nmimlknn,ok\n")

    def test_unknown_format(self):
        with self.assertRaises(InvalidArgument):
            emit_report(self.report, "xml")

    def test_single_evaluation(self):
        text = emit_eval_report(_report()).decode().splitlines()
        self.assertEqual(text[1], "0.203 0.150 0.100 1.200 0.800")
        rows = emit_eval_report(_report(), "csv").decode().splitlines()
        self.assertEqual(rows[0], "metric,value,cases_used")
        self.assertEqual(rows[1], "hamming_loss,0.2034,10")


class ScoresTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dataset = easy_dataset()
        model = train_miml_knn(self.dataset, MimlKnnParams(r=3, c=3))
        self.predictions = predict_many(model, self.dataset.bags)
        self.case_ids = [c.case_id for c in self.dataset.cases]

    def test_written_scores_read_back_exactly(self):
        path = write_scores(Path(self.tmp.name) / "scores.csv", self.case_ids, self.predictions, ("upper", "right"))
        dump = read_scores(path)
        self.assertEqual(dump.case_ids, tuple(self.case_ids))
        np.testing.assert_array_equal(dump.scores, np.vstack([p.scores for p in self.predictions]))
        self.assertEqual(list(dump.decided), [p.decided for p in self.predictions])

        report = evaluate_scores(dump, self.dataset)
        self.assertEqual(report.average_precision, 1.0)
        self.assertEqual(report.hamming_loss, 0.0)

    def test_scored_case_missing_from_truth(self):
        path = write_scores(Path(self.tmp.name) / "scores.csv", self.case_ids, self.predictions, ("upper", "right"))
        truth = self.dataset.subset(range(11))
        with self.assertRaisesRegex(DatasetValidationError, "both-3"):
            evaluate_scores(read_scores(path), truth)

    def test_label_names_must_match(self):
        path = write_scores(Path(self.tmp.name) / "scores.csv", self.case_ids, self.predictions, ("a", "b"))
        with self.assertRaises(DatasetValidationError):
            evaluate_scores(read_scores(path), self.dataset)

    def test_malformed_file(self):
        path = Path(self.tmp.name) / "bad.csv"
        path.write_text("case_id,upper,right,decided\nx,0.1,oops,0\n")
        with self.assertRaisesRegex(DatasetFormatError, ":2:"):
            read_scores(path)

    def test_undecodable_file_names_the_line(self):
        path = Path(self.tmp.name) / "bad.csv"
        path.write_bytes(b"case_id,upper,right,decided\nx,0.1,0.2,0\ny,\xff,0.2,0\n")
        with self.assertRaisesRegex(DatasetFormatError, ":3:"):
            read_scores(path)


class ExtractTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)
        rng = np.random.default_rng(0)

        def roi():
            return RgbImage(rng.integers(0, 256, size=(7, 7, 3), dtype=np.uint8))

        (self.root / "case-a").mkdir()
        write_image(roi(), self.root / "case-a" / "roi-1.png")
        write_image(roi(), self.root / "case-a" / "roi-2.ppm")
        (self.root / "case-a" / "case.json").write_text(json.dumps({"expert_id": "e1", "labels": ["mild", 2]}))
        (self.root / "case-b").mkdir()
        write_image(roi(), self.root / "case-b" / "roi.ppm")
        (self.root / "case-c").mkdir()
        (self.root / "case-c" / "notes.txt").write_text("no images here")

    def test_directory_to_dataset(self):
        result = extract_dataset(self.root, label_names=("mild", "moderate", "severe"))
        self.assertEqual(result.dropped, 1)
        a, b = result.dataset.cases
        self.assertEqual((a.case_id, a.expert_id, list(a.labels)), ("case-a", "e1", [0, 2]))
        self.assertEqual(len(a.bag), 2)
        self.assertEqual((b.case_id, b.expert_id, len(b.labels)), ("case-b", "unknown", 0))
        self.assertEqual(result.dataset.manifest.dim, 256)

    def test_unknown_label_name(self):
        (self.root / "case-b" / "case.json").write_text(json.dumps({"labels": ["fatal"]}))
        with self.assertRaises(DatasetFormatError):
            extract_dataset(self.root, label_names=("mild", "moderate", "severe"))

    def test_not_a_directory(self):
        with self.assertRaises(InvalidArgument):
            extract_dataset(self.root / "missing")


class HistoryTests(TestCase):
    def test_recorded_run_gives_back_the_report(self):
        report = BenchReport(
            rows=(
                BenchRow("mimlknn", {"r": 3}, 7, _report(), 0.5),
                BenchRow("kisar", {}, 7, None, 0.1, "InvalidArgument: bad"),
            ),
            seed=7,
        )
        run = record_benchmark(report, "/data/train", "/data/test")
        run.refresh_from_db()
        self.assertEqual(run.status, RunStatus.DONE)
        self.assertIsNotNone(run.finished_at)
        self.assertEqual(run.results.count(), 2)
        self.assertEqual(run.results.get(algorithm="kisar").status, ResultStatus.FAILED)
        self.assertEqual(report_from_run(run), report)

    def test_rerecording_replaces_results(self):
        first = BenchReport(rows=(BenchRow("mimlknn", {}, 0, _report(), 0.5),), seed=0)
        run = record_benchmark(first)
        second = BenchReport(rows=(BenchRow("mimlknn", {}, 0, _report(ap=0.9), 0.4),), seed=0)
        record_benchmark(second, run=run)
        self.assertEqual(run.results.count(), 1)
        self.assertEqual(run.results.get().average_precision, 0.9)


class BenchmarkTaskTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / "easy"
        save_dataset(easy_dataset(), self.path)

    def test_task_records_results(self):
        run = BenchRun.objects.create(
            seed=0,
            train_path=str(self.path),
            test_path=str(self.path),
            algorithms=["mimlknn"],
            params={"mimlknn": {"r": 3, "c": 3}},
        )
        run_benchmark_task.apply(args=(run.pk,))
        run.refresh_from_db()
        self.assertEqual(run.status, RunStatus.DONE)
        result = run.results.get()
        self.assertEqual(result.status, ResultStatus.OK)
        self.assertEqual(result.average_precision, 1.0)

    def test_unreadable_dataset_fails_the_run(self):
        run = BenchRun.objects.create(seed=0, train_path="/nonexistent", test_path="/nonexistent")
        run_benchmark_task.apply(args=(run.pk,))
        run.refresh_from_db()
        self.assertEqual(run.status, RunStatus.FAILED)
        self.assertIn("DatasetFormatError", run.error)
        self.assertFalse(run.results.exists())
