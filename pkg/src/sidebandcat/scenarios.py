"""Higher-level studies: digital Rabi-gate phase-instability comparison,
analytic cat-state visibility, and detection-pulse-area optimization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import UndefinedVisibilityError
from .fockspace import QUBIT_E, QUBIT_G, JointState, dim, new_ground
from .interferometry import (
    BSB_VERIFICATION_AREA,
    RSB_VERIFICATION_AREA,
    uniform_grid,
)
from .preparation import HALF_TRANSFER_AREA, alternating_kinds
from .sideband import BSB, RSB, PulseSpec, apply_pulse, apply_pulse_batch, RabiModel


@dataclass(frozen=True)
class RabiGateSpec:
    """Digitally synthesized two-sideband gate
    exp[i t (e^{i phi_r} sp a + e^{-i phi_r} sm a^dag
             + e^{i phi_b} sp a^dag + e^{-i phi_b} sm a)]."""

    duration: float
    phi_r: float = 0.0
    phi_b: float = 0.0
    trotter_steps: int = 64
    dphi: float = 0.0

    def __post_init__(self):
        if self.trotter_steps < 1:
            raise ValueError("trotter_steps must be >= 1")
        if self.dphi < 0:
            raise ValueError("dphi must be >= 0")


def _micro_pulses(spec: RabiGateSpec, phi_r: float, phi_b: float):
    """Per-step RSB/BSB pulse parameters of the first-order splitting.

    The sideband exponential exp[i t (sp a e^{i phi} + h.c.)] equals the
    block pulse with area 2t and pulse phase pi/2 - phi.
    """
    dt = spec.duration / spec.trotter_steps
    rsb = (RSB, 2.0 * dt, 0.5 * math.pi - phi_r)
    bsb = (BSB, 2.0 * dt, 0.5 * math.pi - phi_b)
    return rsb, bsb


def apply_rabi_gate(
    state: JointState, spec: RabiGateSpec, rng: np.random.Generator | None = None
) -> JointState:
    """Trotterized Rabi gate; instability offsets (one per quadrature,
    fixed for the whole gate) are drawn from rng when dphi > 0."""
    phi_r, phi_b = spec.phi_r, spec.phi_b
    if spec.dphi > 0:
        if rng is None:
            raise ValueError("instability requested but no rng given")
        phi_r = phi_r + rng.uniform(-spec.dphi, spec.dphi)
        phi_b = phi_b + rng.uniform(-spec.dphi, spec.dphi)
    rsb, bsb = _micro_pulses(spec, phi_r, phi_b)
    for _ in range(spec.trotter_steps):
        state = apply_pulse(state, PulseSpec(*rsb), check_leak=False)
        state = apply_pulse(state, PulseSpec(*bsb), check_leak=False)
    return state


def rabi_gate_generator(phi_r: float, phi_b: float, n_max: int) -> np.ndarray:
    """Dense Hermitian generator H of the target gate exp[i t H]."""
    d = dim(n_max)
    h = np.zeros((d, d), dtype=complex)
    for n in range(1, n_max + 1):
        e_idx = 2 * (n - 1) + QUBIT_E
        g_idx = 2 * n + QUBIT_G
        h[e_idx, g_idx] += math.sqrt(n) * np.exp(1j * phi_r)  # sp a
        h[g_idx, e_idx] += math.sqrt(n) * np.exp(-1j * phi_r)
    for n in range(0, n_max):
        e_idx = 2 * (n + 1) + QUBIT_E
        g_idx = 2 * n + QUBIT_G
        h[e_idx, g_idx] += math.sqrt(n + 1) * np.exp(1j * phi_b)  # sp a^dag
        h[g_idx, e_idx] += math.sqrt(n + 1) * np.exp(-1j * phi_b)
    return h


def exact_rabi_gate(spec: RabiGateSpec, n_max: int) -> np.ndarray:
    """Dense matrix exponential of the target gate (Trotter oracle)."""
    h = rabi_gate_generator(spec.phi_r, spec.phi_b, n_max)
    return expm(1j * spec.duration * h)


def trotter_error(spec: RabiGateSpec, n_max: int) -> float:
    """Operator-norm difference between the Trotterized and exact gates,
    measured on the interior block (top two Fock rows/columns excluded)."""
    d = dim(n_max)
    basis = np.eye(d, dtype=complex)
    amps = np.empty((d, 2, n_max + 1), dtype=complex)
    amps[:, QUBIT_G, :] = basis[:, 0::2]
    amps[:, QUBIT_E, :] = basis[:, 1::2]
    rsb, bsb = _micro_pulses(spec, spec.phi_r, spec.phi_b)
    model = RabiModel()
    for _ in range(spec.trotter_steps):
        amps = apply_pulse_batch(amps, rsb[0], rsb[1], np.float64(rsb[2]), model)
        amps = apply_pulse_batch(amps, bsb[0], bsb[1], np.float64(bsb[2]), model)
    u_trot = np.empty((d, d), dtype=complex)
    u_trot[0::2, :] = np.swapaxes(amps[:, QUBIT_G, :], 0, 1)
    u_trot[1::2, :] = np.swapaxes(amps[:, QUBIT_E, :], 0, 1)
    u_exact = exact_rabi_gate(spec, n_max)
    interior = 2 * (n_max - 1)
    diff = u_trot[:interior, :interior] - u_exact[:interior, :interior]
    return float(np.linalg.norm(diff, ord=2))


# ---------------------------------------------------------------------------
# Phase-instability comparison
# ---------------------------------------------------------------------------

SIDEBAND_METHOD = "sideband"
RABI_GATE_METHOD = "rabi_gate"

# Per-gate duration chosen so the mean phonon number after N gates grows
# comparably to N half-transfer sideband pulses (displacement ~ N/4, so
# <n> ~ (N/4)^2 ~ 4 at N = 8).
RABI_GATE_DURATION = 0.25


@dataclass(frozen=True)
class SweepPoint:
    dphi: float
    mean_contrast: float
    mean_visibility: float
    stderr: float


def _sideband_realization_contrast(n_pulses, dphi, rng, grid, n_max):
    phases = rng.uniform(-dphi, dphi, n_pulses) if dphi > 0 else np.zeros(n_pulses)
    state = new_ground(n_max)
    kinds = alternating_kinds(n_pulses)
    for kind, ph in zip(kinds, phases):
        state = apply_pulse(state, PulseSpec(kind, HALF_TRANSFER_AREA, ph % (2 * math.pi)))
    p1, p2 = np.meshgrid(grid, grid, indexing="ij")
    amps = np.broadcast_to(state.amps, p1.shape + state.amps.shape)
    amps = apply_pulse_batch(amps, RSB, RSB_VERIFICATION_AREA, p1, RabiModel())
    amps = apply_pulse_batch(amps, BSB, BSB_VERIFICATION_AREA, p2, RabiModel())
    pg = np.sum(np.abs(amps[..., QUBIT_G, :]) ** 2, axis=-1)
    return float(pg.max() - pg.min()), float((pg.max() - pg.min()) / (pg.max() + pg.min()))


def _rabi_realization_contrast(n_gates, dphi, rng, grid, n_max, trotter_steps):
    state = new_ground(n_max)
    for _ in range(n_gates):
        spec = RabiGateSpec(RABI_GATE_DURATION, 0.0, 0.0, trotter_steps, dphi)
        state = apply_rabi_gate(state, spec, rng)
    p1, p2 = np.meshgrid(grid, grid, indexing="ij")
    amps = np.broadcast_to(state.amps, p1.shape + state.amps.shape)
    # verification: n_gates further Rabi gates whose red/blue quadrature
    # phases carry the two scan knobs, so the preparation can be undone
    # and the branches re-interfere
    dt = RABI_GATE_DURATION / trotter_steps
    model = RabiModel()
    for _ in range(n_gates):
        for _ in range(trotter_steps):
            amps = apply_pulse_batch(amps, RSB, 2 * dt, 0.5 * math.pi - p1, model)
            amps = apply_pulse_batch(amps, BSB, 2 * dt, 0.5 * math.pi - p2, model)
    pg = np.sum(np.abs(amps[..., QUBIT_G, :]) ** 2, axis=-1)
    return float(pg.max() - pg.min()), float((pg.max() - pg.min()) / (pg.max() + pg.min()))


def instability_sweep(
    method: str,
    n_pulses: int,
    dphi_grid,
    samples: int = 64,
    seed: int = 0,
    n_max: int = 32,
    grid_points: int = 16,
    trotter_steps: int = 32,
) -> list[SweepPoint]:
    """Mean maximum contrast (over the full 2D verification scan) versus
    the per-pulse phase-instability scale."""
    if method not in (SIDEBAND_METHOD, RABI_GATE_METHOD):
        raise ValueError(f"unknown method {method!r}")
    grid = uniform_grid(grid_points)
    out = []
    for dphi in dphi_grid:
        rng = np.random.default_rng(seed)
        cs, vs = [], []
        for _ in range(samples):
            if method == SIDEBAND_METHOD:
                c, v = _sideband_realization_contrast(n_pulses, dphi, rng, grid, n_max)
            else:
                c, v = _rabi_realization_contrast(
                    n_pulses, dphi, rng, grid, n_max, trotter_steps
                )
            cs.append(c)
            vs.append(v)
        cs = np.asarray(cs)
        out.append(
            SweepPoint(
                float(dphi), float(cs.mean()), float(np.mean(vs)),
                float(cs.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Cat-state interference formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatSpec:
    """sqrt(weight)|e>|alpha> + e^{i rel_phase} sqrt(1-weight)|g>|-beta>."""

    alpha: complex
    beta: complex
    weight: float = 0.5
    rel_phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("weight must be in [0, 1]")


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> for coherent states."""
    return np.exp(-(abs(alpha) ** 2 + abs(beta) ** 2) / 2 + np.conj(alpha) * beta)


def coherent_fock_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """Truncated Fock amplitudes of |alpha>."""
    if alpha == 0:
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[0] = 1.0
        return amps
    n = np.arange(n_max + 1)
    log_fact = np.cumsum(np.concatenate([[0.0], np.log(np.arange(1, n_max + 1))]))
    return np.exp(-abs(alpha) ** 2 / 2 + n * np.log(complex(alpha)) - 0.5 * log_fact)


def cat_cutoff(*alphas) -> int:
    """Fock cutoff adequate for the given coherent amplitudes."""
    biggest = max(abs(a) for a in alphas)
    return int(math.ceil(biggest**2 + 6 * biggest + 10))


def cat_metrics(spec: CatSpec, measurement: CatSpec):
    """Fringe parameters (a, b) with F(phi) = a + b cos(phi), and the
    derived contrast C = 2b and visibility V = b/a, for projecting the
    cat `spec` onto the cat `measurement`."""
    big_a = math.sqrt(measurement.weight * spec.weight) * coherent_overlap(
        measurement.alpha, spec.alpha
    )
    big_b = math.sqrt((1 - measurement.weight) * (1 - spec.weight)) * coherent_overlap(
        -measurement.beta, -spec.beta
    )
    a = abs(big_a) ** 2 + abs(big_b) ** 2
    b = 2 * abs(big_a) * abs(big_b)
    if a == 0:
        raise UndefinedVisibilityError("projection vanishes; visibility undefined")
    return float(a), float(b), float(2 * b), float(b / a)


# ---------------------------------------------------------------------------
# Detection-pulse-area optimization
# ---------------------------------------------------------------------------

GOLDEN = (math.sqrt(5) - 1) / 2


def _golden_section(fn, lo, hi, evals):
    """Deterministic golden-section maximization of fn on [lo, hi]."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    used = 2
    while used < evals:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = fn(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = fn(x1)
        used += 1
    return (x1, f1) if f1 >= f2 else (x2, f2)


@dataclass(frozen=True)
class DetectionOptimum:
    mean_visibility: float
    mean_contrast: float
    baseline_visibility: float
    per_realization_visibility: np.ndarray
    per_realization_contrast: np.ndarray
    optimized_areas: np.ndarray


def _detection_objective(state, areas, grid, n_max):
    """Global 2D fringe (contrast, visibility) for an alternating
    RSB/BSB detection sequence whose RSB pulses share phi1 and BSB
    pulses share phi2."""
    p1, p2 = np.meshgrid(grid, grid, indexing="ij")
    amps = np.broadcast_to(state.amps, p1.shape + state.amps.shape)
    model = RabiModel()
    for j, area in enumerate(areas):
        kind = RSB if j % 2 == 0 else BSB
        phases = p1 if j % 2 == 0 else p2
        amps = apply_pulse_batch(amps, kind, float(area), phases, model)
    pg = np.sum(np.abs(amps[..., QUBIT_G, :]) ** 2, axis=-1)
    c = float(pg.max() - pg.min())
    return c, c / float(pg.max() + pg.min())


def optimize_detection_areas(
    n_pulses: int,
    samples: int = 32,
    seed: int = 0,
    optimizer_budget: int = 150,
    n_max: int = 32,
    grid_points: int = 16,
    rounds: int = 3,
    area_bounds: tuple = (0.05, math.pi),
) -> DetectionOptimum:
    """Per random-phase preparation realization, maximize the detection
    fringe visibility over the N detection pulse areas by coordinate
    descent (golden section per coordinate, `rounds` passes), starting
    from the half-transfer point.  Deterministic for a fixed seed.
    """
    if optimizer_budget < 1:
        raise ValueError("optimizer_budget must be >= 1")
    rng = np.random.default_rng(seed)
    grid = uniform_grid(grid_points)
    per_evals = max(3, optimizer_budget // max(1, rounds * n_pulses))
    vises, cons = [], []
    baselines = []
    best_areas = None
    for _ in range(samples):
        phases = rng.uniform(0, 2 * math.pi, n_pulses)
        state = new_ground(n_max)
        kinds = alternating_kinds(n_pulses)
        for kind, ph in zip(kinds, phases):
            state = apply_pulse(state, PulseSpec(kind, HALF_TRANSFER_AREA, ph))
        areas = np.full(n_pulses, HALF_TRANSFER_AREA)
        c0, v0 = _detection_objective(state, areas, grid, n_max)
        baselines.append(v0)
        best_v, best_c = v0, c0
        for _ in range(rounds):
            for j in range(n_pulses):
                def fn(a, j=j):
                    trial = areas.copy()
                    trial[j] = a
                    return _detection_objective(state, trial, grid, n_max)[1]

                a_opt, v_opt = _golden_section(fn, area_bounds[0], area_bounds[1], per_evals)
                if v_opt > best_v:
                    areas[j] = a_opt
                    best_c, best_v = _detection_objective(state, areas, grid, n_max)
        vises.append(best_v)
        cons.append(best_c)
        best_areas = areas
    vises = np.asarray(vises)
    cons = np.asarray(cons)
    return DetectionOptimum(
        float(vises.mean()),
        float(cons.mean()),
        float(np.mean(baselines)),
        vises,
        cons,
        best_areas,
    )
