import csv
import io
import logging
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from ..core import LabelSet, MIMLDataset
from ..exceptions import DatasetFormatError, DatasetValidationError, InvalidArgument
from ..learners import Prediction
from ..metrics import EvalReport, evaluate_all

logger = logging.getLogger(__name__)

DECIDED_COLUMN = "decided"


class ScoreDump(NamedTuple):
    label_names: tuple[str, ...]
    case_ids: tuple[str, ...]
    scores: np.ndarray  # (n, L)
    decided: tuple[LabelSet, ...]


def write_scores(path, case_ids: Sequence[str], predictions: Sequence[Prediction], label_names) -> Path:
    """One row per case: case_id, L scores (shortest round-trip floats), decided as `0;2`."""
    if len(case_ids) != len(predictions):
        raise InvalidArgument(f"{len(case_ids)} case ids but {len(predictions)} predictions")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["case_id", *label_names, DECIDED_COLUMN])
        for case_id, pred in zip(case_ids, predictions):
            writer.writerow(
                [
                    case_id,
                    *(repr(float(s)) for s in pred.scores),
                    ";".join(str(m) for m in pred.decided),
                ]
            )
    logger.info("scores.written path=%s cases=%s", path, len(case_ids))
    return path


def read_scores(path) -> ScoreDump:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DatasetFormatError(f"{path}: cannot read: {exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        lineno = data.count(b"\n", 0, exc.start) + 1
        raise DatasetFormatError(f"{path}:{lineno}: not UTF-8: {exc.reason}") from exc
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows or len(rows[0]) < 3 or rows[0][0] != "case_id" or rows[0][-1] != DECIDED_COLUMN:
        raise DatasetFormatError(f"{path}: header must be case_id,<labels...>,{DECIDED_COLUMN}")

    label_names = tuple(rows[0][1:-1])
    n_labels = len(label_names)
    case_ids, scores, decided = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != n_labels + 2:
            raise DatasetFormatError(f"{path}:{lineno}: expected {n_labels + 2} fields, got {len(row)}")
        try:
            values = [float(v) for v in row[1:-1]]
            members = [int(m) for m in row[-1].split(";") if m != ""]
        except ValueError as exc:
            raise DatasetFormatError(f"{path}:{lineno}: {exc}") from exc
        if any(not 0 <= m < n_labels for m in members):
            raise DatasetFormatError(f"{path}:{lineno}: decided label outside 0..{n_labels - 1}")
        case_ids.append(row[0])
        scores.append(values)
        decided.append(LabelSet.of(members, n_labels))

    return ScoreDump(
        label_names=label_names,
        case_ids=tuple(case_ids),
        scores=np.asarray(scores, dtype=np.float64).reshape(len(case_ids), n_labels),
        decided=tuple(decided),
    )


def evaluate_scores(dump: ScoreDump, truth: MIMLDataset) -> EvalReport:
    if tuple(dump.label_names) != tuple(truth.manifest.label_names):
        raise DatasetValidationError("score file labels differ from the truth dataset's label names")
    by_id = {case.case_id: case for case in truth.cases}
    missing = [cid for cid in dump.case_ids if cid not in by_id]
    if missing:
        raise DatasetValidationError(
            f"{len(missing)} scored case(s) not in the truth dataset, first {missing[0]!r}"
        )
    return evaluate_all(
        dump.scores,
        list(dump.decided),
        [by_id[cid].labels for cid in dump.case_ids],
        truth.n_labels,
    )
