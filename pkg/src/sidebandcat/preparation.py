"""Alternating BSB/RSB preparation sequences and phase-vector sampling.

Sequences start with a BSB pulse and alternate; odd-length sequences
end on a BSB pulse.  The half-transfer area pi/2 gives 50% population
transfer on the |g,0> <-> |e,1> pair (mixing angle pi/4).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPhasesError
from .fockspace import JointState, fock_distribution, new_ground
from .sideband import BSB, RSB, PulseSpec, RabiModel, apply_pulse

HALF_TRANSFER_AREA = math.pi / 2

DEFAULT_N_MAX = 32
DEFAULT_SAMPLES = 512


@dataclass(frozen=True)
class SequenceSpec:
    """Ordered preparation pulses with their stable-but-unknown phases."""

    pulses: tuple
    n_prep: int
    phase_vector: np.ndarray

    def __post_init__(self):
        phases = np.asarray(self.phase_vector, dtype=float)
        if len(self.pulses) != self.n_prep or len(phases) != self.n_prep:
            raise InvalidPhasesError(
                f"expected {self.n_prep} pulses and phases, got "
                f"{len(self.pulses)} pulses / {len(phases)} phases"
            )
        for j, p in enumerate(self.pulses):
            want = BSB if j % 2 == 0 else RSB
            if p.kind != want:
                raise InvalidPhasesError(
                    f"pulse {j + 1} must be {want} in an alternating sequence, got {p.kind}"
                )
        object.__setattr__(self, "pulses", tuple(self.pulses))
        object.__setattr__(self, "phase_vector", phases)


def alternating_kinds(n: int) -> list[str]:
    """Pulse kinds for an n-pulse alternating sequence (BSB first)."""
    return [BSB if j % 2 == 0 else RSB for j in range(n)]


def build_sequence(
    areas, phases, rabi_model: RabiModel = RabiModel()
) -> SequenceSpec:
    """Alternating sequence with explicit per-pulse areas."""
    areas = np.asarray(areas, dtype=float)
    phases = np.asarray(phases, dtype=float)
    if areas.shape != phases.shape:
        raise InvalidPhasesError(
            f"areas and phases must have equal length, got {areas.shape} vs {phases.shape}"
        )
    n = len(areas)
    kinds = alternating_kinds(n)
    pulses = tuple(
        PulseSpec(kinds[j], float(areas[j]), float(phases[j]), rabi_model) for j in range(n)
    )
    return SequenceSpec(pulses, n, phases)


def build_half_transfer_sequence(n_pulses: int, phases) -> SequenceSpec:
    """Alternating sequence with the uniform half-transfer area."""
    if n_pulses < 1:
        raise InvalidPhasesError(f"need at least one pulse, got {n_pulses}")
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (n_pulses,):
        raise InvalidPhasesError(
            f"phase vector length {phases.shape} does not match N={n_pulses}"
        )
    return build_sequence(np.full(n_pulses, HALF_TRANSFER_AREA), phases)


def sqrt_compensated_areas(n_pulses: int) -> np.ndarray:
    """Areas shrunk as 1/sqrt(j/2) so pulse j still half-transfers near the
    typical occupied transition (n of order j/2) instead of over-rotating."""
    j = np.arange(1, n_pulses + 1, dtype=float)
    return HALF_TRANSFER_AREA / np.sqrt(np.maximum(1.0, j / 2.0))


def prepare(seq: SequenceSpec, n_max: int = DEFAULT_N_MAX) -> JointState:
    """Run the sequence on |g, 0>."""
    state = new_ground(n_max)
    for pulse in seq.pulses:
        state = apply_pulse(state, pulse)
    return state


def sample_phase_vectors(n_pulses: int, count: int, seed: int) -> np.ndarray:
    """count i.i.d. uniform phase vectors on [0, 2pi)^N, seeded.

    Deterministic for a fixed seed (NumPy Generator / PCG64); bitwise
    reproducibility is guaranteed within one build only.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * math.pi, size=(count, n_pulses))


def sub_seeds(seed: int, count: int) -> list:
    """Independent child seeds for per-realization work."""
    return list(np.random.SeedSequence(seed).spawn(count))


@dataclass(frozen=True)
class GrowthPoint:
    n_pulses: int
    mean: float
    std: float


def growth_curve(
    n_list,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    n_max: int = DEFAULT_N_MAX,
    areas_mode: str = "half_transfer",
) -> list[GrowthPoint]:
    """Phase-averaged (<n>, std n) after N preparation pulses, per N.

    areas_mode "half_transfer" uses the uniform default area;
    "sqrt_compensated" shrinks areas to keep the ladder climbing.
    """
    out = []
    for i, n_pulses in enumerate(n_list):
        phases = sample_phase_vectors(n_pulses, samples, seed + i)
        if areas_mode == "half_transfer":
            areas = np.full(n_pulses, HALF_TRANSFER_AREA)
        elif areas_mode == "sqrt_compensated":
            areas = sqrt_compensated_areas(n_pulses)
        else:
            raise ValueError(f"unknown areas_mode {areas_mode!r}")
        means = np.empty(samples)
        stds = np.empty(samples)
        for k in range(samples):
            state = prepare(build_sequence(areas, phases[k]), n_max)
            dist = fock_distribution(state)
            means[k] = dist.mean
            stds[k] = dist.std
        out.append(GrowthPoint(n_pulses, float(means.mean()), float(stds.mean())))
    return out


@dataclass(frozen=True)
class ScenarioSpec:
    """Reusable preparation scenario: pulse count, areas, phases, sampling."""

    n_pulses: int
    areas: np.ndarray = None
    phases: object = "random"  # "random" or explicit vector
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if self.areas is None:
            object.__setattr__(self, "areas", np.full(self.n_pulses, HALF_TRANSFER_AREA))
        else:
            areas = np.asarray(self.areas, dtype=float)
            if areas.shape != (self.n_pulses,):
                raise InvalidPhasesError(
                    f"areas length {areas.shape} does not match N={self.n_pulses}"
                )
            object.__setattr__(self, "areas", areas)
        if not isinstance(self.phases, str):
            phases = np.asarray(self.phases, dtype=float)
            if phases.shape != (self.n_pulses,):
                raise InvalidPhasesError(
                    f"phases length {phases.shape} does not match N={self.n_pulses}"
                )
            object.__setattr__(self, "phases", phases)
        elif self.phases != "random":
            raise InvalidPhasesError(f"phases must be 'random' or a vector, got {self.phases!r}")

    def phase_draws(self) -> np.ndarray:
        """(samples, N) phase vectors: sampled, or the fixed vector repeated."""
        if isinstance(self.phases, str):
            return sample_phase_vectors(self.n_pulses, self.samples, self.seed)
        return np.tile(np.asarray(self.phases, dtype=float), (self.samples, 1))

    def prepare_one(self, phases) -> JointState:
        return prepare(build_sequence(self.areas, phases), self.n_max)

    def to_json_obj(self) -> dict:
        return {
            "N": self.n_pulses,
            "areas": [float(a) for a in self.areas],
            "phases": self.phases if isinstance(self.phases, str) else [float(p) for p in self.phases],
            "samples": self.samples,
            "seed": self.seed,
            "n_max": self.n_max,
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "ScenarioSpec":
        return ScenarioSpec(
            n_pulses=int(obj["N"]),
            areas=obj.get("areas"),
            phases=obj.get("phases", "random"),
            samples=int(obj.get("samples", DEFAULT_SAMPLES)),
            seed=int(obj.get("seed", 0)),
            n_max=int(obj.get("n_max", DEFAULT_N_MAX)),
        )

    @staticmethod
    def from_json(text: str) -> "ScenarioSpec":
        return ScenarioSpec.from_json_obj(json.loads(text))
