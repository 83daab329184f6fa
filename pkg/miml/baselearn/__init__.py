from .clustering import CentroidResult, MedoidResult, k_means, k_medoids
from .ridge import DEFAULT_RIDGE, LinearMap, ridge_solve
from .svm import KernelSpec, SvmModel, rbf_kernel, svm_margin, train_binary_svm

__all__ = [
    "KernelSpec",
    "SvmModel",
    "rbf_kernel",
    "train_binary_svm",
    "svm_margin",
    "k_medoids",
    "k_means",
    "MedoidResult",
    "CentroidResult",
    "LinearMap",
    "ridge_solve",
    "DEFAULT_RIDGE",
]
