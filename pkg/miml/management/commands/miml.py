"""
`python manage.py miml <subcommand>`: the toolkit's command-line surface.

Exit codes: 0 success, 2 usage error, 3 data validation error, 4 training failure.
"""

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from miml.enums import Algorithm, ReportFormat
from miml.exceptions import (
    DatasetValidationError,
    InvalidArgument,
    ModelFormatError,
    UndefinedMetric,
)
from miml.features import load_stain_matrix
from miml.learners import PARAMS, load_model, params_from_overrides, predict_many, save_model
from miml.learners import train as train_model
from miml.models import BenchRun
from miml.services import (
    SynthConfig,
    emit_eval_report,
    emit_report,
    evaluate_scores,
    extract_dataset,
    generate_synthetic,
    load_dataset,
    read_scores,
    record_benchmark,
    resolve_algorithms,
    run_benchmark,
    save_dataset,
    stratified_split,
    write_scores,
)

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_TRAINING = 4


def _key_values(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise InvalidArgument(f"--param expects key=value, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


def _bench_params(pairs) -> dict:
    """`algo.key=value` -> {algo: {key: value}}."""
    out: dict = {}
    for key, value in _key_values(pairs).items():
        algo, sep, name = key.partition(".")
        if not sep or algo not in Algorithm.values:
            raise InvalidArgument(f"bench --param expects <algorithm>.<key>=value, got {key!r}")
        out.setdefault(algo, {})[name] = value
    return out


class Command(BaseCommand):
    help = "Generate, extract, split, train, predict, evaluate and benchmark MIML datasets."

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest="subcommand", required=True)

        p = sub.add_parser("gen-synth", help="write a seeded synthetic dataset")
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bags", type=int, required=True)
        p.add_argument("--labels", type=int, required=True)
        p.add_argument("--dim", type=int, required=True)
        p.add_argument("--sigma", type=float, default=0.5)
        p.add_argument("--sep", type=float, default=5.0)
        p.add_argument("--instances", type=int, default=2, help="instances per chosen label")
        p.add_argument("--background", type=int, default=1, help="background instances per bag")

        p = sub.add_parser("extract", help="build a dataset from a directory of ROI images")
        p.add_argument("--images", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--stain-vectors", dest="stain_vectors")
        p.add_argument("--labels", help="comma-separated label vocabulary")

        p = sub.add_parser("split", help="stratified train/test split")
        p.add_argument("--in", dest="in_dir", required=True)
        p.add_argument("--out-train", dest="out_train", required=True)
        p.add_argument("--out-test", dest="out_test", required=True)
        p.add_argument("--train-frac", dest="train_frac", type=float, required=True)
        p.add_argument("--seed", type=int, default=0)

        p = sub.add_parser("train", help="train one algorithm and save the model")
        p.add_argument("--algo", choices=Algorithm.values, required=True)
        p.add_argument("--in", dest="in_dir", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")

        p = sub.add_parser("predict", help="score a dataset with a saved model")
        p.add_argument("--model", required=True)
        p.add_argument("--in", dest="in_dir", required=True)
        p.add_argument("--out", required=True)

        p = sub.add_parser("eval", help="evaluate a score dump against ground truth")
        p.add_argument("--scores", required=True)
        p.add_argument("--truth", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--format", choices=ReportFormat.values, default=ReportFormat.TEXT)

        p = sub.add_parser("bench", help="train and evaluate several algorithms")
        p.add_argument("--train", required=True)
        p.add_argument("--test", required=True)
        p.add_argument("--algos", default="all")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--report")
        p.add_argument("--format", choices=ReportFormat.values, default=ReportFormat.TEXT)
        p.add_argument("--param", action="append", default=[], metavar="ALGO.KEY=VALUE")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--record", action="store_true", help="store the run in the database")
        p.add_argument("--enqueue", action="store_true", help="run on the Celery worker instead")

    def handle(self, *args, **options):
        handler = getattr(self, "_" + options["subcommand"].replace("-", "_"))
        try:
            handler(options)
        except InvalidArgument as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE) from exc
        except (DatasetValidationError, ModelFormatError, UndefinedMetric) as exc:
            raise CommandError(str(exc), returncode=EXIT_DATA) from exc

    def _gen_synth(self, options):
        cfg = SynthConfig(
            n_bags=options["bags"],
            n_labels=options["labels"],
            dim=options["dim"],
            instances_per_label=options["instances"],
            background_instances=options["background"],
            sigma=options["sigma"],
            separation=options["sep"],
        )
        dataset = generate_synthetic(cfg, seed=options["seed"])
        save_dataset(dataset, options["out"])
        self.stdout.write(f"wrote {len(dataset)} cases to {options['out']}")

    def _extract(self, options):
        labels = None
        if options["labels"]:
            labels = [s.strip() for s in options["labels"].split(",") if s.strip()]
        stains = load_stain_matrix(options["stain_vectors"]) if options["stain_vectors"] else None
        result = extract_dataset(options["images"], label_names=labels, stains=stains)
        save_dataset(result.dataset, options["out"])
        self.stdout.write(
            f"wrote {len(result.dataset)} cases to {options['out']} ({result.dropped} without ROI dropped)"
        )

    def _split(self, options):
        result = stratified_split(load_dataset(options["in_dir"]), options["train_frac"], options["seed"])
        save_dataset(result.train, options["out_train"])
        save_dataset(result.test, options["out_test"])
        self.stdout.write(
            f"train={len(result.train)} test={len(result.test)} dropped={result.dropped}"
        )

    def _train(self, options):
        algorithm = Algorithm(options["algo"])
        params = params_from_overrides(PARAMS[algorithm], _key_values(options["param"]))
        dataset = load_dataset(options["in_dir"])
        try:
            model = train_model(algorithm, dataset, params, seed=options["seed"])
        except (InvalidArgument, DatasetValidationError):
            raise
        except Exception as exc:
            logger.exception("train.failed algorithm=%s", algorithm.value)
            raise CommandError(f"training failed: {exc}", returncode=EXIT_TRAINING) from exc
        save_model(model, options["out"])
        if model.flags:
            self.stderr.write(f"warning: {', '.join(model.flags)}")
        self.stdout.write(f"saved {algorithm.label} model to {options['out']}")

    def _predict(self, options):
        model = load_model(options["model"])
        dataset = load_dataset(options["in_dir"])
        if tuple(dataset.manifest.label_names) != model.label_names:
            raise DatasetValidationError("dataset label names differ from the model's")
        predictions = predict_many(model, dataset.bags)
        write_scores(options["out"], [c.case_id for c in dataset.cases], predictions, model.label_names)
        self.stdout.write(f"scored {len(predictions)} cases into {options['out']}")

    def _eval(self, options):
        report = evaluate_scores(read_scores(options["scores"]), load_dataset(options["truth"]))
        out = Path(options["out"])
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(emit_eval_report(report, options["format"]))
        self.stdout.write(f"wrote evaluation to {out}")

    def _bench(self, options):
        algorithms = [a.value for a in resolve_algorithms(options["algos"])]
        params = _bench_params(options["param"])

        if options["enqueue"]:
            from miml.tasks import run_benchmark_task

            run = BenchRun.objects.create(
                seed=options["seed"],
                train_path=str(Path(options["train"]).resolve()),
                test_path=str(Path(options["test"]).resolve()),
                algorithms=algorithms,
                params=params,
            )
            run_benchmark_task.delay(run.pk)
            self.stdout.write(f"queued run {run.pk}")
            return

        if not options["report"]:
            raise InvalidArgument("bench needs --report FILE (or --enqueue)")
        report = run_benchmark(
            load_dataset(options["train"]),
            load_dataset(options["test"]),
            algorithms=algorithms,
            params=params,
            seed=options["seed"],
            workers=options["workers"],
        )
        out = Path(options["report"])
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(emit_report(report, options["format"]))
        if options["record"]:
            run = record_benchmark(report, options["train"], options["test"])
            self.stdout.write(f"recorded run {run.pk}")

        failed = [r.algorithm for r in report.rows if not r.ok]
        if failed:
            self.stderr.write(f"failed: {', '.join(failed)}")
        self.stdout.write(f"wrote report to {out}")
