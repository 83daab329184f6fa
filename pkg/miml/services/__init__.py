from .benchmark import BenchReport, BenchRow, RunBenchmarkService, resolve_algorithms, run_benchmark
from .dataset_io import dataset_fingerprint, load_dataset, save_dataset
from .extract import ExtractResult, extract_dataset
from .history import record_benchmark, report_from_run
from .report import emit_eval_report, emit_report, parse_report_csv
from .scores import ScoreDump, evaluate_scores, read_scores, write_scores
from .split import SplitResult, stratified_split
from .synthetic import SynthConfig, class_centers, generate_synthetic

__all__ = [
    "load_dataset",
    "save_dataset",
    "dataset_fingerprint",
    "stratified_split",
    "SplitResult",
    "SynthConfig",
    "class_centers",
    "generate_synthetic",
    "RunBenchmarkService",
    "run_benchmark",
    "resolve_algorithms",
    "BenchReport",
    "BenchRow",
    "emit_report",
    "emit_eval_report",
    "parse_report_csv",
    "write_scores",
    "read_scores",
    "evaluate_scores",
    "ScoreDump",
    "extract_dataset",
    "ExtractResult",
    "record_benchmark",
    "report_from_run",
]
