from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..exceptions import InvalidArgument

# what callers asking for "plain least squares" get
DEFAULT_RIDGE = 1e-6


@dataclass(frozen=True)
class LinearMap:
    weights: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray  # (out_dim,)

    def apply(self, inputs) -> np.ndarray:
        """Row-wise map: inputs (n, in_dim) -> (n, out_dim); a 1-D input gives 1-D output."""
        x = np.asarray(inputs, dtype=np.float64)
        return x @ self.weights.T + self.bias

    def to_payload(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": self.bias.tolist()}

    @classmethod
    def from_payload(cls, payload: dict) -> "LinearMap":
        bias = np.asarray(payload["bias"], dtype=np.float64)
        weights = np.asarray(payload["weights"], dtype=np.float64).reshape(bias.shape[0], -1)
        return cls(weights=weights, bias=bias)


def ridge_solve(phi, targets, lam: float = DEFAULT_RIDGE) -> LinearMap:
    """
    W minimising ||Phi W' - T||^2 + lam ||W||^2, from the regularised normal
    equations (Phi'Phi + lam I) W' = Phi'T. Falls back to least squares when
    lam = 0 and Phi'Phi is singular.
    """
    phi = np.atleast_2d(np.asarray(phi, dtype=np.float64))
    T = np.asarray(targets, dtype=np.float64)
    if T.ndim == 1:
        T = T.reshape(-1, 1)
    if phi.shape[0] < 1 or phi.shape[0] != T.shape[0]:
        raise InvalidArgument(f"row mismatch: Phi has {phi.shape[0]}, T has {T.shape[0]}")
    if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(T))):
        raise InvalidArgument("ridge_solve needs finite inputs")
    if lam < 0 or not np.isfinite(lam):
        raise InvalidArgument("lambda must be finite and >= 0")

    gram = phi.T @ phi + lam * np.eye(phi.shape[1])
    rhs = phi.T @ T
    try:
        w_t = linalg.solve(gram, rhs, assume_a="sym")
    except linalg.LinAlgError:
        w_t = linalg.lstsq(phi, T)[0]
    else:
        if not np.all(np.isfinite(w_t)):
            w_t = linalg.lstsq(phi, T)[0]

    return LinearMap(weights=np.ascontiguousarray(w_t.T), bias=np.zeros(T.shape[1]))
