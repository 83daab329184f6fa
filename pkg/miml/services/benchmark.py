import dataclasses
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from django.conf import settings

from ..core import MIMLDataset
from ..enums import Algorithm
from ..exceptions import DatasetValidationError, InvalidArgument
from ..learners import PARAMS, TRAINERS, params_from_overrides, predict_many
from ..metrics import EvalReport, evaluate_all

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    params: dict
    seed: int
    report: Optional[EvalReport]
    seconds: float
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.report is not None

    @property
    def label(self) -> str:
        return str(Algorithm(self.algorithm).label)


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...] = field(default_factory=tuple)
    seed: int = 0


def resolve_algorithms(selection: Optional[Iterable[str] | str]) -> list[Algorithm]:
    """`None`, "all" or a list / comma-separated string of algorithm names, in report order."""
    if selection is None:
        return list(Algorithm)
    if isinstance(selection, str):
        selection = [s for s in selection.split(",") if s.strip()]
    names = {s.strip().lower() for s in selection}
    if "all" in names:
        return list(Algorithm)
    unknown = names - set(Algorithm.values)
    if unknown:
        raise InvalidArgument(f"unknown algorithm(s) {sorted(unknown)}; expected {list(Algorithm.values)} or all")
    if not names:
        raise InvalidArgument("no algorithm selected")
    return [a for a in Algorithm if a.value in names]


class RunBenchmarkService:
    """
    Train each selected algorithm on `train`, score every `test` case and
    evaluate. A failing algorithm yields a failed row instead of aborting the
    run. Rows always come back in the fixed algorithm order, whatever the
    number of workers.
    """

    def __call__(
        self,
        train: MIMLDataset,
        test: MIMLDataset,
        algorithms=None,
        params: Optional[Mapping] = None,
        seed: int = 0,
        workers: Optional[int] = None,
    ) -> BenchReport:
        self._validate(train, test)
        selected = resolve_algorithms(algorithms)
        params = params or {}
        workers = int(workers or getattr(settings, "MIML_BENCH_MAX_WORKERS", 1))

        def job(algorithm: Algorithm) -> BenchRow:
            return self._run_one(algorithm, train, test, params.get(algorithm.value), seed)

        if workers > 1 and len(selected) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(job, selected))
        else:
            rows = [job(a) for a in selected]

        logger.info(
            "bench.done algorithms=%s failed=%s seed=%s",
            len(rows),
            sum(not r.ok for r in rows),
            seed,
        )
        return BenchReport(rows=tuple(rows), seed=seed)

    def _validate(self, train: MIMLDataset, test: MIMLDataset) -> None:
        if len(train) == 0:
            raise InvalidArgument("training set is empty")
        a, b = train.manifest, test.manifest
        if a.dim != b.dim or tuple(a.label_names) != tuple(b.label_names):
            raise DatasetValidationError("train and test manifests differ (dim or label names)")

    def _params_for(self, algorithm: Algorithm, given):
        if given is None:
            return PARAMS[algorithm]()
        if isinstance(given, Mapping):
            return params_from_overrides(PARAMS[algorithm], given)
        return given

    def _run_one(self, algorithm, train, test, given, seed) -> BenchRow:
        started = time.perf_counter()
        params = None
        try:
            params = self._params_for(algorithm, given)
            model = TRAINERS[algorithm](train, params, seed)
            predictions = predict_many(model, test.bags)
            report = evaluate_all(
                [p.scores for p in predictions],
                [p.decided for p in predictions],
                test.label_sets,
                test.n_labels,
            )
        except Exception as exc:
            logger.warning("bench.failed algorithm=%s error=%r", algorithm.value, exc)
            return BenchRow(
                algorithm=algorithm.value,
                params=dataclasses.asdict(params) if params is not None else dict(given or {}),
                seed=seed,
                report=None,
                seconds=time.perf_counter() - started,
                error=f"{type(exc).__name__}: {exc}",
            )

        seconds = time.perf_counter() - started
        logger.info("bench.row algorithm=%s seconds=%.3f", algorithm.value, seconds)
        return BenchRow(
            algorithm=algorithm.value,
            params=dataclasses.asdict(params),
            seed=seed,
            report=report,
            seconds=seconds,
        )


run_benchmark = RunBenchmarkService()
