"""
Image directory -> dataset. Layout: one sub-directory per case, holding the
case's ROI images (`*.ppm`, `*.png`, read in file-name order) and optionally
`case.json` with {"expert_id": ..., "labels": [names or indices]}.
"""

import json
import logging
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

from django.conf import settings

from ..core import Case, DatasetManifest, LabelSet, MIMLDataset, validate_dataset
from ..exceptions import DatasetFormatError, DatasetValidationError, InvalidArgument
from ..features import IMAGE_SUFFIXES, StainMatrix, extract_case_features, load_stain_matrix, read_image
from ..features.lbp import N_BINS

logger = logging.getLogger(__name__)

CASE_FILE = "case.json"
UNKNOWN_EXPERT = "unknown"


class ExtractResult(NamedTuple):
    dataset: MIMLDataset
    dropped: int  # case directories without any ROI image


def _case_meta(case_dir: Path, label_names: Sequence[str]) -> tuple[str, list[int]]:
    meta_path = case_dir / CASE_FILE
    if not meta_path.exists():
        return UNKNOWN_EXPERT, []
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        expert = str(meta.get("expert_id", UNKNOWN_EXPERT))
        raw_labels = list(meta.get("labels", []))
    except (OSError, ValueError, AttributeError, TypeError) as exc:
        raise DatasetFormatError(f"{meta_path}: {exc}") from exc

    index = {name: i for i, name in enumerate(label_names)}
    labels = []
    for raw in raw_labels:
        if isinstance(raw, int):
            labels.append(raw)
        elif raw in index:
            labels.append(index[raw])
        else:
            raise DatasetFormatError(f"{meta_path}: unknown label {raw!r}")
    return expert, labels


def extract_dataset(
    images_dir,
    label_names: Optional[Sequence[str]] = None,
    stains: Optional[StainMatrix] = None,
) -> ExtractResult:
    root = Path(images_dir)
    if not root.is_dir():
        raise InvalidArgument(f"{root} is not a directory")
    label_names = tuple(label_names or settings.MIML_LABEL_NAMES)
    stains = stains or load_stain_matrix()

    cases = []
    dropped = 0
    for case_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        images = sorted(
            p for p in case_dir.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
        )
        if not images:
            logger.warning("extract.no_roi case=%s", case_dir.name)
            dropped += 1
            continue
        expert, labels = _case_meta(case_dir, label_names)
        bag = extract_case_features([read_image(p) for p in images], stains)
        cases.append(
            Case(
                case_id=case_dir.name,
                expert_id=expert,
                bag=bag,
                labels=LabelSet.of(labels, len(label_names)),
            )
        )

    manifest = DatasetManifest(dim=N_BINS, label_names=label_names, provenance=f"extracted from {root.name}")
    dataset = MIMLDataset(manifest, tuple(cases))
    violations = validate_dataset(dataset)
    if violations:
        raise DatasetValidationError(f"{len(violations)} violation(s); first: {violations[0]}", violations)
    logger.info("extract.done cases=%s dropped=%s", len(cases), dropped)
    return ExtractResult(dataset, dropped)
