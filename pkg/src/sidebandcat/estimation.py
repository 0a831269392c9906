"""Shot-limited Rabi-flop simulation, phonon-distribution fitting with
Monte Carlo error propagation, conditional distributions, and estimation
of the coherence factor w from fringe data.

The flop model is

    P_g(t) = 1/2 * (1 + sum_n P_n cos(Omega_{n,n+1} t) exp(-gamma_n t)),

with per-term decay gamma_n = gamma0 * (n+1)**gamma_exponent and the
blue-sideband frequencies Omega_{n,n+1} from the configured coupling
model.  Times are in ms and omega0 in rad/ms (2*pi x kHz).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import lsq_linear, minimize_scalar

from .errors import (
    InconsistentPopulationsError,
    UndefinedConditionalError,
    UnresolvedFrequenciesError,
)
from .fockspace import FockDistribution, JointDensity, fock_distribution
from .noise import DecoherenceModel, apply_model
from .preparation import ScenarioSpec
from .sideband import (
    BEYOND_LD,
    CARRIER,
    DEFAULT_ETA,
    PulseSpec,
    RabiModel,
    apply_pulse_density,
    rabi_frequency,
)
from .interferometry import (
    RSB_VERIFICATION_AREA,
    pg_grid,
    uniform_grid,
)

DEFAULT_OMEGA0 = 2 * math.pi * 21.7  # rad/ms
DEFAULT_GAMMA0 = 0.1  # 1/ms
GAMMA_EXPONENT = 0.7
DEFAULT_SHOTS = 100
RESAMPLE_REPLICAS = 100


@dataclass(frozen=True)
class RabiFlopRecord:
    """Time series of ground-state populations with the shot count."""

    times: np.ndarray
    pg: np.ndarray
    shots_per_point: int = DEFAULT_SHOTS

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.pg, dtype=float)
        if t.shape != p.shape:
            raise ValueError("times and pg must have equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "pg", p)


@dataclass(frozen=True)
class FlopModel:
    """Sideband Rabi-flop model parameters."""

    omega0: float = DEFAULT_OMEGA0
    gamma0: float = DEFAULT_GAMMA0
    gamma_exponent: float = GAMMA_EXPONENT
    rabi_model: RabiModel = field(default_factory=lambda: RabiModel(BEYOND_LD, DEFAULT_ETA))

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ValueError("omega0 must be > 0")
        if self.gamma0 < 0:
            raise ValueError("gamma0 must be >= 0")

    def sideband_frequency(self, n: int) -> float:
        """Omega_{n,n+1} in rad/ms."""
        ratio = rabi_frequency(n, +1, self.rabi_model)
        if self.rabi_model.kind == BEYOND_LD:
            return self.omega0 * ratio
        return self.omega0 * self.rabi_model.eta * ratio

    def decay_rate(self, n: int) -> float:
        return self.gamma0 * (n + 1) ** self.gamma_exponent

    def curve(self, probs: np.ndarray, times: np.ndarray) -> np.ndarray:
        """Noise-free P_g(t) for occupation probabilities probs."""
        times = np.asarray(times, dtype=float)
        out = np.full_like(times, 0.5)
        for n, p in enumerate(probs):
            if p == 0.0:
                continue
            out += 0.5 * p * np.cos(self.sideband_frequency(n) * times) * np.exp(
                -self.decay_rate(n) * times
            )
        return out


def simulate_rabi_flop(
    dist: FockDistribution,
    model: FlopModel,
    times,
    shots: int = DEFAULT_SHOTS,
    seed: int = 0,
) -> RabiFlopRecord:
    """Evaluate the flop model and add binomial sampling noise."""
    times = np.asarray(times, dtype=float)
    curve = np.clip(model.curve(dist.probs, times), 0.0, 1.0)
    if shots <= 0:
        return RabiFlopRecord(times, curve, 0)
    rng = np.random.default_rng(seed)
    sampled = rng.binomial(shots, curve) / shots
    return RabiFlopRecord(times, sampled, shots)


@dataclass(frozen=True)
class PhononFit:
    """Fitted occupation probabilities with 1-sigma uncertainties."""

    probs: np.ndarray
    uncertainties: np.ndarray
    residual: float
    degenerate: bool = False


def _design_matrix(model: FlopModel, times: np.ndarray, n_fit_max: int) -> np.ndarray:
    cols = []
    for n in range(n_fit_max + 1):
        cols.append(
            0.5 * np.cos(model.sideband_frequency(n) * times) * np.exp(-model.decay_rate(n) * times)
        )
    return np.stack(cols, axis=1)


def _solve_probs(m: np.ndarray, y: np.ndarray) -> np.ndarray:
    res = lsq_linear(m, y, bounds=(0.0, 1.0), method="trf", tol=1e-14)
    return res.x


def fit_phonon_distribution(
    record: RabiFlopRecord,
    model: FlopModel,
    n_fit_max: int = 12,
    replicas: int = RESAMPLE_REPLICAS,
    seed: int = 0,
) -> PhononFit:
    """Nonnegativity-constrained least squares for the P_n, with Monte
    Carlo resampling of the record (binomial noise) for uncertainties."""
    if len(record.times) < n_fit_max + 2:
        raise UnresolvedFrequenciesError(
            f"need at least {n_fit_max + 2} samples to fit {n_fit_max + 1} populations"
        )
    m = _design_matrix(model, record.times, n_fit_max)
    span = record.times[-1] - record.times[0]
    gaps = np.diff([model.sideband_frequency(n) for n in range(n_fit_max + 1)])
    if span * float(np.min(np.abs(gaps))) < math.pi:
        raise UnresolvedFrequenciesError(
            "record too short to resolve adjacent sideband frequencies"
        )
    y = record.pg - 0.5
    probs = _solve_probs(m, y)
    residual = float(np.sqrt(np.mean((m @ probs - y) ** 2)))

    shots = record.shots_per_point if record.shots_per_point > 0 else DEFAULT_SHOTS
    degenerate = float(np.ptp(record.pg)) < 4.0 * math.sqrt(0.25 / shots)

    rng = np.random.default_rng(seed)
    base = np.clip(record.pg, 0.0, 1.0)
    samples = np.empty((replicas, n_fit_max + 1))
    for r in range(replicas):
        resampled = rng.binomial(shots, base) / shots
        samples[r] = _solve_probs(m, resampled - 0.5)
    sigma = samples.std(axis=0, ddof=1)
    return PhononFit(probs, sigma, residual, degenerate)


def conditional_distribution(
    rho: JointDensity, outcome: str, carrier_flip: bool = False
) -> FockDistribution:
    """Phonon distribution conditioned on a qubit measurement outcome,
    optionally after an ideal carrier pi pulse."""
    if outcome not in ("g", "e"):
        raise ValueError(f"outcome must be 'g' or 'e', got {outcome!r}")
    if carrier_flip:
        rho = apply_pulse_density(rho, PulseSpec(CARRIER, math.pi, 0.0))
    pops = rho.populations()
    row = pops[0] if outcome == "g" else pops[1]
    total = row.sum()
    if total < 1e-12:
        raise UndefinedConditionalError(f"outcome {outcome!r} has zero probability")
    return FockDistribution(row / total)


# ---------------------------------------------------------------------------
# Coherence-factor estimation from a single-pulse fringe
# ---------------------------------------------------------------------------


def fringe_dc_level(probs: np.ndarray, area: float, kind: str = "rsb") -> float:
    """Phase-independent P_g after one verification pulse on a
    parity-locked state with phonon populations probs (even n in the
    ground branch, odd n in the excited branch)."""
    dc = 0.0
    for n, p in enumerate(probs):
        if p == 0.0:
            continue
        if kind == "rsb":
            ang = 0.5 * area * (math.sqrt(n) if n % 2 == 0 else math.sqrt(n + 1))
            dc += p * (math.cos(ang) ** 2 if n % 2 == 0 else math.sin(ang) ** 2)
        else:
            ang = 0.5 * area * (math.sqrt(n + 1) if n % 2 == 0 else math.sqrt(n))
            dc += p * (math.cos(ang) ** 2 if n % 2 == 0 else math.sin(ang) ** 2)
    return dc


def ideal_modulation_amplitude(probs: np.ndarray, area: float, kind: str = "rsb") -> float:
    """Peak-to-mean fringe amplitude of a fully coherent (w = 1) state
    with the given populations, assuming aligned coherence phases.

    Exact whenever a single Fock pair contributes (all the shipped
    scenarios); an upper bound otherwise.
    """
    amp = 0.0
    nmax = len(probs) - 1
    for n in range(0, nmax):
        lo, hi = (n, n + 1)
        if kind == "rsb":
            # pairs (e, 2k-1) <-> (g, 2k): lo odd
            if lo % 2 == 1:
                amp += math.sin(0.5 * area * math.sqrt(hi) * 2) * math.sqrt(probs[lo] * probs[hi])
        else:
            # pairs (g, 2k) <-> (e, 2k+1): lo even
            if lo % 2 == 0:
                amp += math.sin(0.5 * area * math.sqrt(hi) * 2) * math.sqrt(probs[lo] * probs[hi])
    return abs(amp)


@dataclass(frozen=True)
class WEstimate:
    w_hat: float
    area_hat: float
    measured_amplitude: float
    ideal_amplitude: float
    dc_level: float
    clipped: bool


def estimate_w(
    phis,
    pg,
    known_probs: FockDistribution,
    nominal_area: float = RSB_VERIFICATION_AREA,
    kind: str = "rsb",
) -> WEstimate:
    """Estimate the coherence factor from a single-pulse fringe.

    The pulse area is first re-estimated from the fringe DC level and the
    independently known populations, then w is the ratio of the measured
    first-harmonic amplitude to the ideal (w = 1) amplitude at that area.
    """
    phis = np.asarray(phis, dtype=float)
    pg = np.asarray(pg, dtype=float)
    dc_meas = float(pg.mean())
    probs = known_probs.probs

    lo, hi = 0.5 * nominal_area, 1.5 * nominal_area
    grid = np.linspace(lo, hi, 64)
    reachable = [fringe_dc_level(probs, a, kind) for a in grid]
    margin = 1e-9 + 3.0 * math.sqrt(0.25 / 100)  # generous shot allowance
    if dc_meas < min(reachable) - margin or dc_meas > max(reachable) + margin:
        raise InconsistentPopulationsError(
            f"fringe DC {dc_meas:.4f} unreachable for areas in "
            f"[{lo:.3f}, {hi:.3f}] given the populations"
        )
    res = minimize_scalar(
        lambda a: (fringe_dc_level(probs, a, kind) - dc_meas) ** 2,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    area_hat = float(res.x)

    c1 = np.mean(pg * np.exp(-1j * phis))
    measured = 2.0 * abs(c1)
    ideal = ideal_modulation_amplitude(probs, area_hat, kind)
    if ideal <= 0:
        raise InconsistentPopulationsError(
            "populations admit no first-order modulation; cannot estimate w"
        )
    w_raw = float(measured / ideal)
    clipped = bool(w_raw < -1e-9 or w_raw > 1.0 + 1e-9)
    return WEstimate(
        float(min(max(w_raw, 0.0), 1.0)), area_hat, measured, ideal, dc_meas, clipped
    )


@dataclass(frozen=True)
class WLedgerRow:
    n_pulses: int
    w_true: float
    w_hat: float

    @property
    def one_minus_w(self) -> float:
        return 1.0 - self.w_hat


def synthesize_fringe(
    scenario: ScenarioSpec,
    w: float,
    area: float,
    kind: str = "rsb",
    points: int = 64,
    shots: int = 0,
    seed: int = 0,
):
    """Single-pulse fringe of a w-mixture state for estimator round trips.

    Returns (phis, pg, FockDistribution of the prepared state).
    """
    phases = scenario.phase_draws()[0]
    state = scenario.prepare_one(phases)
    rho = apply_model(state, DecoherenceModel("w_mixture", w))
    phis = uniform_grid(points)
    if kind == "rsb":
        pg = pg_grid(rho, area, 0.0, phis, np.array([0.0]))[:, 0]
    else:
        pg = pg_grid(rho, 0.0, area, np.array([0.0]), phis)[0, :]
    if shots > 0:
        rng = np.random.default_rng(seed)
        pg = rng.binomial(shots, np.clip(pg, 0, 1)) / shots
    return phis, pg, fock_distribution(state)


def fit_w_ledger(scenarios: list[dict]) -> list[WLedgerRow]:
    """Batch w-estimation round trips over scenario configurations.

    Each entry: {"N": int, "w": float, optional "area", "kind",
    "points", "shots", "seed", "n_max", "phases"}.
    """
    rows = []
    for cfg in scenarios:
        n = int(cfg["N"])
        w = float(cfg["w"])
        kind = cfg.get("kind", "bsb" if n == 1 else "rsb")
        area = float(cfg.get("area", RSB_VERIFICATION_AREA))
        areas = cfg.get("areas")
        if areas is None and n == 1:
            # slightly unbalanced single pulse so the fringe DC pins the area
            areas = np.array([0.8 * math.pi / 2])
        scenario = ScenarioSpec(
            n_pulses=n,
            areas=areas,
            phases=cfg.get("phases", "random"),
            samples=1,
            seed=int(cfg.get("seed", 0)),
            n_max=int(cfg.get("n_max", 32)),
        )
        phis, pg, dist = synthesize_fringe(
            scenario, w, area, kind,
            points=int(cfg.get("points", 64)),
            shots=int(cfg.get("shots", 0)),
            seed=int(cfg.get("seed", 0)) + 1,
        )
        est = estimate_w(phis, pg, dist, area, kind)
        rows.append(WLedgerRow(n, w, est.w_hat))
    return rows
