"""Phenomenological decoherence models.

All models act on a pure joint state and return a density.  They touch
only off-diagonal elements (or mix with diagonal projections), so the
phonon distribution and the parity expectations are invariant.

Kinds:
  w_mixture         w |psi><psi| + (1-w) diag[|psi><psi|]
  w_power           off-diagonal (n, m) elements scaled by w**|n-m|
  qubit_dephase     qubit coherences zeroed, oscillator coherence kept
                    within each qubit branch
  full_dephase      diagonal in the joint qubit-Fock basis
  classical_mixture w |psi><psi| + (1-w) * qubit-dephased version
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotParityLockedError
from .fockspace import JointDensity, JointState, dim, parity_lock_defect

W_MIXTURE = "w_mixture"
W_POWER = "w_power"
QUBIT_DEPHASE = "qubit_dephase"
FULL_DEPHASE = "full_dephase"
CLASSICAL_MIXTURE = "classical_mixture"

_KINDS = (W_MIXTURE, W_POWER, QUBIT_DEPHASE, FULL_DEPHASE, CLASSICAL_MIXTURE)

# Models whose branch split |g> x even / |e> x odd must be well defined.
_NEEDS_LOCK = (QUBIT_DEPHASE, CLASSICAL_MIXTURE)


@dataclass(frozen=True)
class DecoherenceModel:
    kind: str
    w: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown decoherence kind {self.kind!r}")
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"w must be in [0, 1], got {self.w}")

    def to_json_obj(self) -> dict:
        obj = {"kind": self.kind}
        if self.kind not in (QUBIT_DEPHASE, FULL_DEPHASE):
            obj["w"] = self.w
        return obj

    @staticmethod
    def from_json_obj(obj: dict) -> "DecoherenceModel":
        return DecoherenceModel(obj["kind"], float(obj.get("w", 1.0)))


def _qubit_dephased(matrix: np.ndarray) -> np.ndarray:
    """Zero the g<->e coherence blocks, keeping both qubit-diagonal blocks."""
    out = matrix.copy()
    out[0::2, 1::2] = 0.0
    out[1::2, 0::2] = 0.0
    return out


def _fock_distance_weights(n_max: int, w: float) -> np.ndarray:
    idx = np.arange(dim(n_max))
    n = idx // 2
    k = np.abs(n[:, None] - n[None, :])
    return np.power(w, k)


def apply_model(pure: JointState, model: DecoherenceModel) -> JointDensity:
    """Decohere a normalized pure state according to the model."""
    if model.kind in _NEEDS_LOCK and parity_lock_defect(pure) > 1e-12:
        raise NotParityLockedError(
            f"{model.kind} requires a parity-locked state; defect "
            f"{parity_lock_defect(pure):.3e}"
        )
    rho = np.outer(pure.flat(), pure.flat().conj())
    w = model.w
    if model.kind == W_MIXTURE:
        out = w * rho + (1.0 - w) * np.diag(np.diag(rho))
    elif model.kind == W_POWER:
        out = rho * _fock_distance_weights(pure.n_max, w)
    elif model.kind == QUBIT_DEPHASE:
        out = _qubit_dephased(rho)
    elif model.kind == FULL_DEPHASE:
        out = np.diag(np.diag(rho))
    elif model.kind == CLASSICAL_MIXTURE:
        out = w * rho + (1.0 - w) * _qubit_dephased(rho)
    else:  # pragma: no cover
        raise ValueError(model.kind)
    return JointDensity(out, pure.n_max)


def apply_model_to_density(rho: JointDensity, model: DecoherenceModel) -> JointDensity:
    """Model action extended linearly to densities (used for chaining)."""
    m = rho.matrix
    w = model.w
    if model.kind == W_MIXTURE:
        out = w * m + (1.0 - w) * np.diag(np.diag(m))
    elif model.kind == W_POWER:
        out = m * _fock_distance_weights(rho.n_max, w)
    elif model.kind == QUBIT_DEPHASE:
        out = _qubit_dephased(m)
    elif model.kind == FULL_DEPHASE:
        out = np.diag(np.diag(m))
    elif model.kind == CLASSICAL_MIXTURE:
        out = w * m + (1.0 - w) * _qubit_dephased(m)
    else:  # pragma: no cover
        raise ValueError(model.kind)
    return JointDensity(out, rho.n_max)


def purity(rho: JointDensity) -> float:
    """trace(rho^2)."""
    return float(np.real(np.sum(rho.matrix * rho.matrix.T)))
