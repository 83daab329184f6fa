"""
Model files: one JSON document

    {"format_version", "algorithm", "params", "seed", "label_names", "payload"}

Floats are written with Python's shortest round-trip repr, so a reloaded
model reproduces the saved one's scores bit for bit.
"""

import json
import logging
from pathlib import Path

from ..core import FORMAT_VERSION
from ..enums import Algorithm
from ..exceptions import ModelFormatError
from .base import TrainedModel

logger = logging.getLogger(__name__)


def model_to_document(model: TrainedModel) -> dict:
    return {"format_version": FORMAT_VERSION, **model.header(), "payload": model.payload()}


def model_from_document(document: dict) -> TrainedModel:
    from . import MODELS, PARAMS

    try:
        version = document["format_version"]
        if version != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported model format_version {version!r}")
        algorithm = Algorithm(document["algorithm"])
        payload = document["payload"]
        common = {
            "params": PARAMS[algorithm](**document["params"]),
            "label_names": tuple(document["label_names"]),
            "dim": int(payload["dim"]),
            "seed": int(document["seed"]),
            "flags": tuple(payload.get("flags", ())),
        }
        return MODELS[algorithm].from_payload(common, payload)
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from exc


def dumps_model(model: TrainedModel) -> str:
    return json.dumps(model_to_document(model), allow_nan=False)


def loads_model(text: str) -> TrainedModel:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ModelFormatError("model file must hold a JSON object")
    return model_from_document(document)


def save_model(model: TrainedModel, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_model(model), encoding="utf-8")
    logger.info("model.saved algorithm=%s path=%s", model.algorithm.value, path)
    return path


def load_model(path) -> TrainedModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from exc
    return loads_model(text)
