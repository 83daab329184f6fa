from ..enums import Algorithm
from .base import (
    Prediction,
    TrainedModel,
    decide,
    params_from_overrides,
    predict,
    predict_many,
)
from .boost import MimlBoostModel, MimlBoostParams, expand_bags, train_miml_boost
from .kisar import KisarModel, KisarParams, train_kisar
from .knn import MimlKnnModel, MimlKnnParams, train_miml_knn
from .m3miml import M3MimlModel, M3MimlParams, train_m3miml
from .mimlsvm import MimlSvmModel, MimlSvmParams, train_miml_svm
from .persistence import dumps_model, load_model, loads_model, save_model
from .rbf import MimlRbfModel, MimlRbfParams, train_miml_rbf

# keyed and ordered by Algorithm; benchmark rows follow this order
TRAINERS = {
    Algorithm.MIMLKNN: train_miml_knn,
    Algorithm.MIMLRBF: train_miml_rbf,
    Algorithm.MIMLSVM: train_miml_svm,
    Algorithm.MIMLBOOST: train_miml_boost,
    Algorithm.M3MIML: train_m3miml,
    Algorithm.KISAR: train_kisar,
}

PARAMS = {
    Algorithm.MIMLKNN: MimlKnnParams,
    Algorithm.MIMLRBF: MimlRbfParams,
    Algorithm.MIMLSVM: MimlSvmParams,
    Algorithm.MIMLBOOST: MimlBoostParams,
    Algorithm.M3MIML: M3MimlParams,
    Algorithm.KISAR: KisarParams,
}

MODELS = {
    Algorithm.MIMLKNN: MimlKnnModel,
    Algorithm.MIMLRBF: MimlRbfModel,
    Algorithm.MIMLSVM: MimlSvmModel,
    Algorithm.MIMLBOOST: MimlBoostModel,
    Algorithm.M3MIML: M3MimlModel,
    Algorithm.KISAR: KisarModel,
}


def train(algorithm, dataset, params=None, seed: int = 0) -> TrainedModel:
    algorithm = Algorithm(algorithm)
    if params is None:
        params = PARAMS[algorithm]()
    elif isinstance(params, dict):
        params = params_from_overrides(PARAMS[algorithm], params)
    return TRAINERS[algorithm](dataset, params, seed)


__all__ = [
    "Prediction",
    "TrainedModel",
    "decide",
    "predict",
    "predict_many",
    "params_from_overrides",
    "train",
    "TRAINERS",
    "PARAMS",
    "MODELS",
    "train_miml_knn",
    "train_miml_rbf",
    "train_miml_svm",
    "train_miml_boost",
    "train_m3miml",
    "train_kisar",
    "expand_bags",
    "MimlKnnParams",
    "MimlRbfParams",
    "MimlSvmParams",
    "MimlBoostParams",
    "M3MimlParams",
    "KisarParams",
    "MimlKnnModel",
    "MimlRbfModel",
    "MimlSvmModel",
    "MimlBoostModel",
    "M3MimlModel",
    "KisarModel",
    "save_model",
    "load_model",
    "dumps_model",
    "loads_model",
]
