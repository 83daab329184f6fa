"""
On-disk dataset: a directory with `manifest.json` and `cases.jsonl`, one case
per line. Floats are written in their shortest round-trip form, so a
load after a save gives back exactly the same numbers.
"""

import hashlib
import json
import logging
from pathlib import Path

from ..core import FORMAT_VERSION, Bag, Case, DatasetManifest, LabelSet, MIMLDataset, validate_dataset
from ..exceptions import DatasetFormatError, DatasetValidationError, InvalidArgument

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
CASES_FILE = "cases.jsonl"


def manifest_to_dict(manifest: DatasetManifest) -> dict:
    return {
        "format_version": manifest.format_version,
        "dim": manifest.dim,
        "label_names": list(manifest.label_names),
        "provenance": manifest.provenance,
    }


def case_to_dict(case: Case) -> dict:
    return {
        "case_id": case.case_id,
        "expert_id": case.expert_id,
        "labels": sorted(case.labels.members),
        "instances": case.bag.instances.tolist(),
    }


def save_dataset(dataset: MIMLDataset, path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    (path / MANIFEST_FILE).write_text(
        json.dumps(manifest_to_dict(dataset.manifest), indent=2) + "\n", encoding="utf-8"
    )
    with open(path / CASES_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for case in dataset.cases:
            fh.write(json.dumps(case_to_dict(case), allow_nan=False) + "\n")
    logger.info("dataset.saved path=%s cases=%s", path, len(dataset))
    return path


def _load_manifest(path: Path) -> DatasetManifest:
    try:
        raw = json.loads((path / MANIFEST_FILE).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetFormatError(f"{path / MANIFEST_FILE}: cannot read: {exc}") from exc
    except ValueError as exc:
        raise DatasetFormatError(f"{path / MANIFEST_FILE}: not JSON: {exc}") from exc

    try:
        version = int(raw.get("format_version", FORMAT_VERSION))
        manifest = DatasetManifest(
            dim=int(raw["dim"]),
            label_names=tuple(str(n) for n in raw["label_names"]),
            format_version=version,
            provenance=str(raw.get("provenance", "")),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise DatasetFormatError(f"{path / MANIFEST_FILE}: malformed manifest: {exc!r}") from exc
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"{path / MANIFEST_FILE}: unsupported format_version {version}")
    return manifest


def _label_index(value) -> int:
    # JSON integers only; 1.5, "1" and true are rejected rather than coerced
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"label {value!r} is not an integer index")
    return value


def _parse_case(line: str, n_labels: int) -> Case:
    raw = json.loads(line)
    return Case(
        case_id=str(raw["case_id"]),
        expert_id=str(raw.get("expert_id", "")),
        bag=Bag(raw["instances"]),
        labels=LabelSet.of((_label_index(m) for m in raw["labels"]), n_labels),
    )


def load_dataset(path) -> MIMLDataset:
    path = Path(path)
    manifest = _load_manifest(path)
    cases_path = path / CASES_FILE
    cases = []
    try:
        # bytes in, decoded per line, so a bad encoding is reported with its line number
        with open(cases_path, "rb") as fh:
            for lineno, raw_line in enumerate(fh, start=1):
                try:
                    line = raw_line.decode("utf-8")
                    if not line.strip():
                        continue
                    cases.append(_parse_case(line, manifest.n_labels))
                except (ValueError, KeyError, TypeError, InvalidArgument) as exc:
                    raise DatasetFormatError(f"{cases_path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise DatasetFormatError(f"{cases_path}: cannot read: {exc}") from exc

    dataset = MIMLDataset(manifest, tuple(cases))
    violations = validate_dataset(dataset)
    if violations:
        raise DatasetValidationError(
            f"{path}: {len(violations)} violation(s); first: {violations[0]}", violations
        )
    logger.info("dataset.loaded path=%s cases=%s", path, len(dataset))
    return dataset


def dataset_fingerprint(dataset: MIMLDataset) -> str:
    """sha256 of the canonical serialisation."""
    digest = hashlib.sha256(json.dumps(manifest_to_dict(dataset.manifest)).encode())
    for case in dataset.cases:
        digest.update(json.dumps(case_to_dict(case)).encode())
    return digest.hexdigest()
