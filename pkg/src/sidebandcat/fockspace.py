"""Truncated qubit (x) Fock Hilbert space: states, densities and observables.

The joint basis is |s, n> with qubit level s in {g, e} and Fock number
n in 0..n_max.  The flat basis ordering used for serialization and for
dense density matrices is

    i = 2*n + s        with s = 0 for |g>, s = 1 for |e>,

so even flat indices are ground-qubit components.  State amplitudes are
kept as a (2, n_max+1) complex array indexed [s, n]; densities are dense
(2*(n_max+1))**2 complex matrices in the flat ordering.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidCutoffError,
    UndefinedConditionalError,
)

NORM_TOL = 1e-9
HERMITICITY_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
LEAK_TOL = 1e-8

QUBIT_G = 0
QUBIT_E = 1


def flat_index(s: int, n: int) -> int:
    """Flat basis index of |s, n>."""
    return 2 * n + s


def dim(n_max: int) -> int:
    return 2 * (n_max + 1)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class JointState:
    """Pure state of the joint qubit-oscillator system.

    amps[s, n] is the amplitude on |s, n>.  Instances are immutable;
    every operation returns a new state.
    """

    amps: np.ndarray
    n_max: int

    def __post_init__(self):
        if self.n_max < 2:
            raise InvalidCutoffError(f"n_max must be >= 2, got {self.n_max}")
        a = np.asarray(self.amps, dtype=complex)
        if a.shape != (2, self.n_max + 1):
            raise DimensionMismatchError(
                f"amps shape {a.shape} incompatible with n_max={self.n_max}"
            )
        object.__setattr__(self, "amps", _freeze(a))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def flat(self) -> np.ndarray:
        """Amplitudes in flat ordering i = 2n + s."""
        out = np.empty(dim(self.n_max), dtype=complex)
        out[0::2] = self.amps[QUBIT_G]
        out[1::2] = self.amps[QUBIT_E]
        return out

    @staticmethod
    def from_flat(vec: np.ndarray, n_max: int) -> "JointState":
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (dim(n_max),):
            raise DimensionMismatchError(
                f"flat vector length {vec.shape} incompatible with n_max={n_max}"
            )
        amps = np.empty((2, n_max + 1), dtype=complex)
        amps[QUBIT_G] = vec[0::2]
        amps[QUBIT_E] = vec[1::2]
        return JointState(amps, n_max)

    def density(self) -> "JointDensity":
        """Outer product |psi><psi| as a dense density."""
        v = self.flat()
        return JointDensity(np.outer(v, v.conj()), self.n_max)

    def top_population(self) -> float:
        """Population in the two highest Fock levels (leakage monitor)."""
        return float(np.sum(np.abs(self.amps[:, self.n_max - 1 :]) ** 2))

    def to_json(self) -> str:
        pairs = [[float(z.real), float(z.imag)] for z in self.flat()]
        return json.dumps({"n_max": self.n_max, "amps": pairs}, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "JointState":
        obj = json.loads(text)
        vec = np.array([complex(re, im) for re, im in obj["amps"]], dtype=complex)
        return JointState.from_flat(vec, int(obj["n_max"]))


@dataclass(frozen=True, eq=False)
class JointDensity:
    """Density operator on the truncated joint space, flat basis ordering."""

    matrix: np.ndarray
    n_max: int

    def __post_init__(self):
        if self.n_max < 2:
            raise InvalidCutoffError(f"n_max must be >= 2, got {self.n_max}")
        m = np.asarray(self.matrix, dtype=complex)
        d = dim(self.n_max)
        if m.shape != (d, d):
            raise DimensionMismatchError(
                f"matrix shape {m.shape} incompatible with n_max={self.n_max}"
            )
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))))

    def check_valid(self) -> None:
        """Raise if Hermiticity, trace or positivity tolerances are violated."""
        if self.hermiticity_defect() > HERMITICITY_TOL:
            raise DimensionMismatchError("density is not Hermitian to tolerance")
        if abs(self.trace - 1.0) > NORM_TOL:
            raise DimensionMismatchError(f"density trace {self.trace} not within tolerance of 1")
        if self.min_eigenvalue() < EIGENVALUE_FLOOR:
            raise DimensionMismatchError("density has negative eigenvalues beyond tolerance")

    def populations(self) -> np.ndarray:
        """Diagonal populations reshaped to [s, n]."""
        diag = np.real(np.diag(self.matrix))
        out = np.empty((2, self.n_max + 1))
        out[QUBIT_G] = diag[0::2]
        out[QUBIT_E] = diag[1::2]
        return out

    def eigen_mixture(self, tol: float = 1e-14):
        """Decompose into (weight, JointState) pairs, dropping tiny weights.

        Exact convex decomposition; useful to evolve mixed states through
        pure-state pipelines without approximation.
        """
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        vals, vecs = np.linalg.eigh(h)
        pairs = []
        for k in range(len(vals) - 1, -1, -1):
            if vals[k] > tol:
                pairs.append((float(vals[k]), JointState.from_flat(vecs[:, k], self.n_max)))
        return pairs

    def to_json(self) -> str:
        rows = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        return json.dumps({"n_max": self.n_max, "matrix": rows}, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "JointDensity":
        obj = json.loads(text)
        m = np.array(
            [[complex(re, im) for re, im in row] for row in obj["matrix"]], dtype=complex
        )
        return JointDensity(m, int(obj["n_max"]))


@dataclass(frozen=True)
class FockDistribution:
    """Phonon-number distribution with its first two moments."""

    probs: np.ndarray
    mean: float = field(default=None)
    std: float = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if self.mean is None:
            n = np.arange(len(p))
            mean = float(np.sum(n * p))
            var = float(np.sum((n - mean) ** 2 * p))
            object.__setattr__(self, "mean", mean)
            object.__setattr__(self, "std", float(np.sqrt(max(var, 0.0))))


def new_ground(n_max: int) -> JointState:
    """The joint ground state |g, 0>."""
    if n_max < 2:
        raise InvalidCutoffError(f"n_max must be >= 2, got {n_max}")
    amps = np.zeros((2, n_max + 1), dtype=complex)
    amps[QUBIT_G, 0] = 1.0
    return JointState(amps, n_max)


def _joint_populations(obj) -> np.ndarray:
    if isinstance(obj, JointState):
        return np.abs(obj.amps) ** 2
    if isinstance(obj, JointDensity):
        return obj.populations()
    raise TypeError(f"expected JointState or JointDensity, got {type(obj)!r}")


def fock_distribution(obj) -> FockDistribution:
    """Phonon distribution P(n) of a state or density, traced over the qubit."""
    pops = _joint_populations(obj)
    return FockDistribution(pops.sum(axis=0))


def parity_expectation(obj, condition: str | None = None) -> float:
    """Average motional parity <(-1)^n>, optionally conditioned on the qubit.

    condition is None (unconditional), "g" or "e".  Conditioning on an
    outcome with probability below 1e-12 raises UndefinedConditionalError.
    """
    pops = _joint_populations(obj)
    if condition is None:
        p = pops.sum(axis=0)
    elif condition in ("g", "e"):
        p = pops[QUBIT_G if condition == "g" else QUBIT_E]
    else:
        raise ValueError(f"condition must be None, 'g' or 'e', got {condition!r}")
    total = p.sum()
    if condition is not None and total < 1e-12:
        raise UndefinedConditionalError(f"qubit outcome {condition!r} has zero probability")
    signs = np.where(np.arange(len(p)) % 2 == 0, 1.0, -1.0)
    return float(np.sum(signs * p) / total)


def reduce_oscillator(density: JointDensity) -> np.ndarray:
    """Partial trace over the qubit; returns the oscillator density matrix."""
    d = density.n_max + 1
    m = density.matrix
    gg = m[0::2, 0::2]
    ee = m[1::2, 1::2]
    out = gg + ee
    assert out.shape == (d, d)
    return out


def overlap(a: JointState, b: JointState) -> complex:
    """Inner product <a|b> (conjugation on the first argument)."""
    if a.n_max != b.n_max:
        raise DimensionMismatchError(
            f"states have different cutoffs: {a.n_max} vs {b.n_max}"
        )
    return complex(np.vdot(a.amps, b.amps))


def parity_lock_defect(state: JointState) -> float:
    """Largest amplitude magnitude outside the (g,even)/(e,odd) subspace."""
    g_odd = np.abs(state.amps[QUBIT_G, 1::2])
    e_even = np.abs(state.amps[QUBIT_E, 0::2])
    worst = 0.0
    if g_odd.size:
        worst = max(worst, float(g_odd.max()))
    if e_even.size:
        worst = max(worst, float(e_even.max()))
    return worst


def is_parity_locked(state: JointState, tol: float = 1e-12) -> bool:
    return parity_lock_defect(state) <= tol


def density_parity_lock_defect(density: JointDensity) -> float:
    """Largest matrix element magnitude involving an off-lock basis state."""
    idx = np.arange(dim(density.n_max))
    s = idx % 2
    n = idx // 2
    off = ((s == QUBIT_G) & (n % 2 == 1)) | ((s == QUBIT_E) & (n % 2 == 0))
    m = np.abs(density.matrix)
    return float(max(m[off, :].max(), m[:, off].max()))
