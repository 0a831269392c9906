"""Verification fringes, contrast/visibility metrics, POVM decomposition
and Fourier coherence extraction for the two-pulse measurement.

The default verification sequence is RSB(t1, phi1) followed by
BSB(t2, phi2); the reversed order is available for reading coherences
that sit on the (g, even) side three quanta below an (e, odd) component.
P_g(phi1, phi2) of any prepared density contains only the harmonics

    (k, l) in {(1,0), (0,1), (1,-1), (2,-1)}          (RSB-first order)

plus conjugates and a DC term.  The (1,-1) family reads internal
oscillator coherences (Fock separation 2 within a qubit branch); the
(2,-1) family reads qubit-flipping separation-3 coherences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AliasingError,
    CutoffViolationError,
    UndefinedVisibilityError,
)
from .fockspace import (
    LEAK_TOL,
    QUBIT_E,
    QUBIT_G,
    JointDensity,
    JointState,
    dim,
    flat_index,
)
from .noise import DecoherenceModel, apply_model
from .preparation import ScenarioSpec
from .sideband import BSB, RSB, RabiModel, apply_pulse_batch

HALF_TRANSFER_AREA = math.pi / 2

# Default verification areas: each pulse is a pi/2 pulse (mixing angle
# pi/4) on the transition that dominates its readout of a parity-locked
# state: m = 2 for the RSB pulse ((e,1) <-> (g,2)) and m = 3 for the BSB
# pulse ((g,2) <-> (e,3)).  This nulls the (7,8) readout of the RSB
# pulse exactly and maximizes the low-order coherence signal.
RSB_VERIFICATION_AREA = math.pi / (2 * math.sqrt(2))
BSB_VERIFICATION_AREA = math.pi / (2 * math.sqrt(3))

RSB_FIRST = "rb"
BSB_FIRST = "br"

# Canonical modulation harmonics (k, l) of P_g for each pulse order,
# in R-magnitude order: second-pulse first-order, first-pulse
# first-order, internal second-order, third-order.
HARMONICS_RSB_FIRST = ((0, 1), (1, 0), (1, -1), (2, -1))
HARMONICS_BSB_FIRST = ((1, 0), (0, 1), (1, -1), (1, -2))

SINGLE_PULSE = "single_pulse"
TWO_PULSE = "two_pulse"


def uniform_grid(points: int) -> np.ndarray:
    """Uniform phase grid on [0, 2pi) with the endpoint excluded."""
    return np.linspace(0.0, 2.0 * math.pi, points, endpoint=False)


@dataclass(frozen=True)
class VerificationSpec:
    """Verification measurement: areas for the RSB pulse (t1) and the BSB
    pulse (t2), phase grids, and temporal pulse order."""

    mode: str = TWO_PULSE
    t1: float = RSB_VERIFICATION_AREA
    t2: float = BSB_VERIFICATION_AREA
    grid1: np.ndarray = field(default_factory=lambda: uniform_grid(32))
    grid2: np.ndarray = field(default_factory=lambda: uniform_grid(32))
    order: str = RSB_FIRST
    rabi_model: RabiModel = RabiModel()

    def __post_init__(self):
        if self.mode not in (SINGLE_PULSE, TWO_PULSE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.order not in (RSB_FIRST, BSB_FIRST):
            raise ValueError(f"unknown order {self.order!r}")
        if self.mode == SINGLE_PULSE and self.t2 != 0.0:
            raise ValueError("single-pulse mode requires t2 = 0")
        for name, g in (("grid1", self.grid1), ("grid2", self.grid2)):
            g = np.asarray(g, dtype=float)
            if g.size == 0:
                raise ValueError(f"{name} must be nonempty")
            if np.any(np.diff(g) <= 0) or g[0] < 0 or g[-1] >= 2 * math.pi:
                raise ValueError(f"{name} must be strictly increasing within [0, 2pi)")
            object.__setattr__(self, name, g)
        if self.t1 < 0 or self.t2 < 0:
            raise ValueError("areas must be >= 0")


def _as_mixture(obj):
    if isinstance(obj, JointState):
        return [(1.0, obj)], obj.n_max
    if isinstance(obj, JointDensity):
        return obj.eigen_mixture(), obj.n_max
    raise TypeError(f"expected JointState or JointDensity, got {type(obj)!r}")


def _evolve_pg_batch(state, t1, t2, phi1, phi2, order, rabi_model) -> np.ndarray:
    """Ground-qubit population after the verification pulses, batched over
    equal-shape phase arrays phi1/phi2."""
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    amps = np.broadcast_to(state.amps, phi1.shape + state.amps.shape)
    pulses = [(RSB, t1, phi1), (BSB, t2, phi2)]
    if order == BSB_FIRST:
        pulses.reverse()
    for kind, area, phases in pulses:
        if area == 0.0:
            continue
        amps = apply_pulse_batch(amps, kind, area, phases, rabi_model)
    leak = float(np.max(np.sum(np.abs(amps[..., :, -2:]) ** 2, axis=(-2, -1)), initial=0.0))
    if leak > LEAK_TOL:
        raise CutoffViolationError(
            f"population {leak:.3e} in top Fock levels exceeds {LEAK_TOL:.0e}"
        )
    return np.sum(np.abs(amps[..., QUBIT_G, :]) ** 2, axis=-1)


def measure_pg(
    rho,
    t1: float,
    t2: float,
    phi1: float,
    phi2: float,
    order: str = RSB_FIRST,
    rabi_model: RabiModel = RabiModel(),
) -> float:
    """P_g after RSB(t1, phi1) and BSB(t2, phi2); zero-area pulses are
    skipped.  Accepts a pure state or a density."""
    mixture, _ = _as_mixture(rho)
    pg = 0.0
    for weight, state in mixture:
        pg += weight * float(
            _evolve_pg_batch(state, t1, t2, np.float64(phi1), np.float64(phi2), order, rabi_model)
        )
    return pg


def pg_grid(rho, t1, t2, grid1, grid2, order=RSB_FIRST, rabi_model=RabiModel()) -> np.ndarray:
    """P_g over the outer product of two phase grids; shape (len1, len2)."""
    p1, p2 = np.meshgrid(np.asarray(grid1), np.asarray(grid2), indexing="ij")
    mixture, _ = _as_mixture(rho)
    out = np.zeros(p1.shape)
    for weight, state in mixture:
        out += weight * _evolve_pg_batch(state, t1, t2, p1, p2, order, rabi_model)
    return out


@dataclass(frozen=True)
class AxisFringe:
    """One-dimensional fringe along a slice of the phase plane."""

    scan: np.ndarray
    values: np.ndarray
    held_constant: float
    contrast: float
    visibility: float


def _contrast_visibility(values: np.ndarray, refine: bool = False):
    vmax = float(np.max(values))
    vmin = float(np.min(values))
    if refine:
        vmax = _parabolic_extremum(values, np.argmax(values), +1)
        vmin = _parabolic_extremum(values, np.argmin(values), -1)
    c = vmax - vmin
    denom = vmax + vmin
    if denom <= 0:
        raise UndefinedVisibilityError("visibility undefined: max + min is zero")
    return c, c / denom


def _parabolic_extremum(values: np.ndarray, idx: int, sign: int) -> float:
    """Three-point quadratic refinement of a grid extremum (cyclic)."""
    m = len(values)
    y0, y1, y2 = values[(idx - 1) % m], values[idx], values[(idx + 1) % m]
    denom = y0 - 2 * y1 + y2
    if abs(denom) < 1e-15:
        return float(y1)
    delta = 0.5 * (y0 - y2) / denom
    refined = y1 - 0.25 * (y0 - y2) * delta
    return float(max(refined, y1) if sign > 0 else min(refined, y1))


@dataclass(frozen=True)
class FringeSurface:
    """Sampled P_g over a (phi1, phi2) grid with derived metrics.

    sum_axis_fringe scans (phi1 + phi2)/2 at fixed difference, probing the
    qubit-oscillator coherence; diff_axis_fringe scans (phi1 - phi2)/2 at
    fixed sum, probing internal oscillator coherence.
    """

    pg: np.ndarray
    grid1: np.ndarray
    grid2: np.ndarray
    contrast: float
    visibility: float
    sum_axis_fringe: AxisFringe | None
    diff_axis_fringe: AxisFringe | None
    order: str = RSB_FIRST


def _axis_slices(pg: np.ndarray, grid: np.ndarray, axis: str):
    """All cyclic slices of a square grid at constant difference ("sum"
    scan) or constant sum ("diff" scan)."""
    m = pg.shape[0]
    i = np.arange(m)
    for k in range(m):
        if axis == "sum":
            values = pg[i, (i - k) % m]  # phi1 - phi2 = grid[k] fixed
        else:
            values = pg[i, (k - i) % m]  # phi1 + phi2 = grid[k] fixed
        yield k, grid[k], values


def _best_axis_fringe(pg, grid, axis, slice_mode="best", refine=False) -> AxisFringe:
    best = None
    acc_c, acc_v = [], []
    for k, const, values in _axis_slices(pg, grid, axis):
        c, v = _contrast_visibility(values, refine)
        acc_c.append(c)
        acc_v.append(v)
        if slice_mode == "zero" and k == 0:
            return AxisFringe(grid, values.copy(), const, c, v)
        if best is None or c > best[0]:
            best = (c, v, const, values.copy())
    if slice_mode == "mean":
        c, v, const, values = best
        return AxisFringe(grid, values, const, float(np.mean(acc_c)), float(np.mean(acc_v)))
    c, v, const, values = best
    return AxisFringe(grid, values, const, c, v)


def scan_fringe(
    rho,
    spec: VerificationSpec,
    slice_mode: str = "mean",
    refine: bool = False,
) -> FringeSurface:
    """Evaluate P_g on the grid and derive contrast, visibility and the
    axis projections (square uniform grids only)."""
    pg = pg_grid(rho, spec.t1, spec.t2, spec.grid1, spec.grid2, spec.order, spec.rabi_model)
    contrast, visibility = _contrast_visibility(pg.ravel(), refine=False)
    sum_fr = diff_fr = None
    if spec.mode == TWO_PULSE and len(spec.grid1) == len(spec.grid2):
        sum_fr = _best_axis_fringe(pg, spec.grid1, "sum", slice_mode, refine)
        diff_fr = _best_axis_fringe(pg, spec.grid1, "diff", slice_mode, refine)
    return FringeSurface(pg, spec.grid1, spec.grid2, contrast, visibility, sum_fr, diff_fr, spec.order)


def fringe_offset(phis: np.ndarray, values: np.ndarray, harmonic: int = 1) -> float:
    """Phase offset delta of a fringe a + A cos(k phi - delta) on a uniform
    full-period grid, from the k-th DFT coefficient."""
    phis = np.asarray(phis, dtype=float)
    c = np.mean(values * np.exp(-1j * harmonic * phis))
    return float(-np.angle(c))


@dataclass(frozen=True)
class MetricStat:
    mean_contrast: float
    mean_visibility: float
    stderr_contrast: float
    stderr_visibility: float


@dataclass(frozen=True)
class AveragedMetrics:
    """Phase-averaged contrast and visibility per measurement axis."""

    axes: dict
    samples: int

    def axis(self, name: str) -> MetricStat:
        return self.axes[name]


def averaged_metrics(
    scenario: ScenarioSpec,
    model: DecoherenceModel | None,
    spec: VerificationSpec,
    samples: int | None = None,
    seed: int | None = None,
    slice_mode: str = "mean",
    threads: int = 1,
) -> AveragedMetrics:
    """Monte Carlo average of per-realization contrast and visibility over
    the preparation phase vectors, separately per measurement axis.

    Realizations are independent; with threads > 1 they are evaluated in
    a pool while the aggregation keeps the draw order, so the result is
    identical for any thread count.
    """
    scenario = ScenarioSpec(
        n_pulses=scenario.n_pulses,
        areas=scenario.areas,
        phases=scenario.phases,
        samples=samples if samples is not None else scenario.samples,
        seed=seed if seed is not None else scenario.seed,
        n_max=scenario.n_max,
    )
    draws = scenario.phase_draws()
    names = ("sum", "diff") if spec.mode == TWO_PULSE else ("phi1",)

    def one(phases):
        state = scenario.prepare_one(phases)
        target = apply_model(state, model) if model is not None else state
        if spec.mode == TWO_PULSE:
            surface = scan_fringe(target, spec, slice_mode)
            return (
                (surface.sum_axis_fringe.contrast, surface.sum_axis_fringe.visibility),
                (surface.diff_axis_fringe.contrast, surface.diff_axis_fringe.visibility),
            )
        values = pg_grid(target, spec.t1, 0.0, spec.grid1, np.array([0.0]), spec.order,
                         spec.rabi_model)[:, 0]
        return (_contrast_visibility(values),)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, draws))
    else:
        rows = [one(phases) for phases in draws]

    axes = {}
    n = len(draws)
    for i, name in enumerate(names):
        cs = np.array([row[i][0] for row in rows])
        vs = np.array([row[i][1] for row in rows])
        axes[name] = MetricStat(
            float(cs.mean()), float(vs.mean()),
            float(cs.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
            float(vs.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        )
    return AveragedMetrics(axes, n)


def overlap_metrics(alpha_e: complex, alpha_o: complex):
    """Contrast and visibility from the even/odd pathway overlaps."""
    cross = abs(alpha_e * np.conj(alpha_o))
    denom = abs(alpha_e) ** 2 + abs(alpha_o) ** 2
    if denom == 0:
        raise UndefinedVisibilityError("both pathway overlaps vanish")
    return float(cross), float(2 * cross / denom)


# ---------------------------------------------------------------------------
# POVM decomposition (closed-form coefficient families)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PovmParts:
    """Ground-detection POVM split by modulation order.

    dc is the phase-independent diagonal; pi1 carries the single-phase
    (first-order Fock) terms, pi2 the phi1 - phi2 (second-order, qubit
    diagonal) terms, pi3 the third-order qubit-flip terms.
    """

    dc: np.ndarray
    pi1: np.ndarray
    pi2: np.ndarray
    pi3: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.dc + self.pi1 + self.pi2 + self.pi3


def _half_angles(area: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.arange(0, n_max + 3, dtype=float)
    ang = 0.5 * area * np.sqrt(m)
    return np.cos(ang), np.sin(ang)


def povm_harmonic_operators(t1: float, t2: float, n_max: int, order: str = RSB_FIRST) -> dict:
    """Operators H_kl with Pi(phi1, phi2) = DC + sum_kl [ H_kl
    e^{i(k phi1 + l phi2)} + h.c. ].

    Keys are the canonical (k, l) tuples for the given pulse order plus
    "dc".  Built from the closed-form trigonometric coefficient families,
    not by multiplying pulse matrices; exact for states supported away
    from the cutoff.
    """
    d = dim(n_max)
    ca, sa = _half_angles(t1, n_max)  # RSB half angles, index = larger Fock index
    cb, sb = _half_angles(t2, n_max)  # BSB half angles
    ops = {kl: np.zeros((d, d), dtype=complex) for kl in
           (HARMONICS_RSB_FIRST if order == RSB_FIRST else HARMONICS_BSB_FIRST)}
    dc = np.zeros((d, d), dtype=complex)

    def G(n):
        return flat_index(QUBIT_G, n)

    def E(n):
        return flat_index(QUBIT_E, n)

    if order == RSB_FIRST:
        for n in range(0, n_max + 1):
            # measurement vector |m_n> components: (g,n), (e,n-1), (e,n+1), (g,n+2)
            dc[G(n), G(n)] += (cb[n + 1] * ca[n]) ** 2
            if n >= 1:
                dc[E(n - 1), E(n - 1)] += (cb[n + 1] * sa[n]) ** 2
            if n + 1 <= n_max:
                dc[E(n + 1), E(n + 1)] += (sb[n + 1] * ca[n + 2]) ** 2
            if n + 2 <= n_max:
                dc[G(n + 2), G(n + 2)] += (sb[n + 1] * sa[n + 2]) ** 2
            if n >= 1:
                ops[(1, 0)][G(n), E(n - 1)] += cb[n + 1] ** 2 * ca[n] * sa[n]
            if n + 2 <= n_max:
                ops[(1, 0)][G(n + 2), E(n + 1)] += -(sb[n + 1] ** 2) * ca[n + 2] * sa[n + 2]
            if n + 1 <= n_max:
                ops[(0, 1)][G(n), E(n + 1)] += cb[n + 1] * sb[n + 1] * ca[n] * ca[n + 2]
            if n + 2 <= n_max:
                ops[(1, -1)][G(n + 2), G(n)] += -cb[n + 1] * sb[n + 1] * ca[n] * sa[n + 2]
            if n >= 1 and n + 1 <= n_max:
                ops[(1, -1)][E(n + 1), E(n - 1)] += cb[n + 1] * sb[n + 1] * sa[n] * ca[n + 2]
            if n >= 1 and n + 2 <= n_max:
                ops[(2, -1)][G(n + 2), E(n - 1)] += -cb[n + 1] * sb[n + 1] * sa[n] * sa[n + 2]
    else:
        for n in range(0, n_max + 1):
            # reversed order: |m_n> components (g,n), (e,n+1), (e,n-1), (g,n-2)
            dc[G(n), G(n)] += (ca[n] * cb[n + 1]) ** 2
            if n + 1 <= n_max:
                dc[E(n + 1), E(n + 1)] += (ca[n] * sb[n + 1]) ** 2
            if n >= 1:
                dc[E(n - 1), E(n - 1)] += (sa[n] * cb[n - 1]) ** 2
            if n >= 2:
                dc[G(n - 2), G(n - 2)] += (sa[n] * sb[n - 1]) ** 2
            if n >= 1:
                ops[(1, 0)][G(n), E(n - 1)] += ca[n] * sa[n] * cb[n + 1] * cb[n - 1]
            if n + 1 <= n_max:
                ops[(0, 1)][G(n), E(n + 1)] += ca[n] ** 2 * cb[n + 1] * sb[n + 1]
            if n >= 2:
                ops[(0, 1)][G(n - 2), E(n - 1)] += -(sa[n] ** 2) * cb[n - 1] * sb[n - 1]
            if n >= 2:
                ops[(1, -1)][G(n), G(n - 2)] += -ca[n] * sa[n] * cb[n + 1] * sb[n - 1]
            if n >= 1 and n + 1 <= n_max:
                ops[(1, -1)][E(n + 1), E(n - 1)] += ca[n] * sa[n] * sb[n + 1] * cb[n - 1]
            if n >= 2 and n + 1 <= n_max:
                ops[(1, -2)][E(n + 1), G(n - 2)] += -ca[n] * sa[n] * sb[n + 1] * sb[n - 1]
    out = {"dc": dc}
    out.update(ops)
    return out


def povm_ground(
    t1: float, t2: float, phi1: float, phi2: float, n_max: int, order: str = RSB_FIRST
) -> PovmParts:
    """Ground-detection POVM at fixed phases, split by modulation order.

    trace(total * rho) reproduces measure_pg for any density supported
    away from the cutoff; with t2 = 0 both pi2 and pi3 vanish.
    """
    ops = povm_harmonic_operators(t1, t2, n_max, order)

    def assembled(keys):
        out = np.zeros_like(ops["dc"])
        for k, l in keys:
            ph = np.exp(1j * (k * phi1 + l * phi2))
            h = ops[(k, l)]
            out += ph * h + np.conj(ph) * h.conj().T
        return out

    if order == RSB_FIRST:
        pi1 = assembled([(1, 0), (0, 1)])
        pi2 = assembled([(1, -1)])
        pi3 = assembled([(2, -1)])
    else:
        pi1 = assembled([(1, 0), (0, 1)])
        pi2 = assembled([(1, -1)])
        pi3 = assembled([(1, -2)])
    return PovmParts(ops["dc"].copy(), pi1, pi2, pi3)


# ---------------------------------------------------------------------------
# Fourier coherence spectrum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherenceSpectrum:
    """Real harmonic amplitudes of P_g(phi1, phi2).

    For each canonical (k, l), P_g contains A cos(k phi1 + l phi2)
    + B sin(k phi1 + l phi2); R-magnitudes are sqrt(A^2 + B^2).  The DC
    value is the grid mean (or the analytic diagonal expectation).
    """

    A: dict
    B: dict
    dc: float
    harmonics: tuple

    def magnitude(self, kl) -> float:
        return math.hypot(self.A[kl], self.B[kl])

    @property
    def R1_prime(self) -> float:
        return self.magnitude(self.harmonics[0])

    @property
    def R1(self) -> float:
        return self.magnitude(self.harmonics[1])

    @property
    def R2(self) -> float:
        return self.magnitude(self.harmonics[2])

    @property
    def R3(self) -> float:
        return self.magnitude(self.harmonics[3])

    def magnitudes(self) -> np.ndarray:
        return np.array([self.R1_prime, self.R1, self.R2, self.R3])

    def to_json_obj(self) -> dict:
        key = lambda kl: f"{kl[0]},{kl[1]}"
        return {
            "A": {key(kl): self.A[kl] for kl in self.harmonics},
            "B": {key(kl): self.B[kl] for kl in self.harmonics},
            "dc": self.dc,
            "R": [self.R1_prime, self.R1, self.R2, self.R3],
        }


def fourier_spectrum(surface: FringeSurface, harmonics: tuple | None = None) -> CoherenceSpectrum:
    """Extract the harmonic amplitudes from a sampled fringe surface.

    Requires uniform full-period grids with at least 8 samples per axis
    per extracted harmonic order; raises AliasingError otherwise.
    """
    if harmonics is None:
        harmonics = HARMONICS_RSB_FIRST if surface.order == RSB_FIRST else HARMONICS_BSB_FIRST
    m1, m2 = surface.pg.shape
    kmax = max(abs(k) for k, _ in harmonics)
    lmax = max(abs(l) for _, l in harmonics)
    if m1 < 8 * kmax or m2 < 8 * lmax:
        raise AliasingError(
            f"grid {m1}x{m2} too coarse for harmonics up to ({kmax},{lmax}); "
            f"need >= {8 * kmax}x{8 * lmax}"
        )
    for g in (surface.grid1, surface.grid2):
        step = np.diff(g)
        if step.size and not np.allclose(step, 2 * math.pi / len(g), atol=1e-12):
            raise AliasingError("harmonic extraction needs uniform full-period grids")
    p1 = surface.grid1
    p2 = surface.grid2
    A, B = {}, {}
    for k, l in harmonics:
        basis = np.exp(-1j * (k * p1[:, None] + l * p2[None, :]))
        c = np.mean(surface.pg * basis)
        A[(k, l)] = float(2 * c.real)
        B[(k, l)] = float(-2 * c.imag)
    return CoherenceSpectrum(A, B, float(surface.pg.mean()), tuple(harmonics))


def analytic_spectrum(rho, t1: float, t2: float, order: str = RSB_FIRST) -> CoherenceSpectrum:
    """Harmonic amplitudes from the closed-form POVM families (no grid)."""
    if isinstance(rho, JointState):
        rho = rho.density()
    ops = povm_harmonic_operators(t1, t2, rho.n_max, order)
    A, B = {}, {}
    harmonics = tuple(kl for kl in ops if kl != "dc")
    for kl in harmonics:
        c = complex(np.sum(ops[kl].T * rho.matrix))  # trace(H rho)
        A[kl] = float(2 * c.real)
        B[kl] = float(-2 * c.imag)
    dc = float(np.real(np.sum(ops["dc"].T * rho.matrix)))
    return CoherenceSpectrum(A, B, dc, harmonics)


PREDICTED_MAX_COEFFS = (1.73, 1.07, 1.14, 1.87)


def predicted_max(spectrum: CoherenceSpectrum, coeffs=PREDICTED_MAX_COEFFS) -> float:
    """Linear contrast predictor from the four harmonic magnitudes."""
    return float(np.dot(coeffs, spectrum.magnitudes()))


# ---------------------------------------------------------------------------
# Per-element contributions to P_g (closed forms with selection rules)
# ---------------------------------------------------------------------------

E_G = "e_g"
E_E = "e_e"
G_G = "g_g"


def offdiag_contribution(
    sector: str, n: int, m: int, kappa: float, theta: float, Theta: float
) -> complex:
    """Contribution to P_g of a unit density element, for the RSB-first
    two-pulse verification with equal half-angle scale kappa (areas
    t1 = t2 = 2 kappa).

    sector "e_g" means the element |e,n><g,m|; "e_e" means |e,n><e,m|;
    "g_g" means |g,n><g,m|.  The local phases enter through the
    equivalent verification phases phi1 = theta - Theta and
    phi2 = theta + Theta.  Returns 0 when no selection rule fires.
    """
    if n < 0 or m < 0:
        raise ValueError("Fock indices must be >= 0")
    phi1 = theta - Theta
    phi2 = theta + Theta

    def c(j):
        return math.cos(kappa * math.sqrt(j)) if j >= 0 else 0.0

    def s(j):
        return math.sin(kappa * math.sqrt(j)) if j >= 0 else 0.0

    if sector == E_G:
        # element |e,n><g,m| picks up the POVM entry <g,m| Pi |e,n>
        if n == m - 1:
            amp = c(m) * s(m) * (c(m + 1) ** 2 - (s(m - 1) ** 2 if m >= 1 else 0.0))
            return amp * np.exp(1j * phi1)
        if n == m + 1:
            return c(m) * c(m + 2) * c(m + 1) * s(m + 1) * np.exp(1j * phi2)
        if n == m - 3:
            return -c(m - 1) * s(m - 1) * s(m - 2) * s(m) * np.exp(1j * (2 * phi1 - phi2))
        return 0j
    if sector == E_E:
        if n == m:
            return complex(c(m + 2) ** 2 * s(m + 1) ** 2 + s(m) ** 2 * c(m + 1) ** 2)
        if n == m + 2:
            return c(m + 2) * s(m + 2) * s(m + 1) * c(m + 3) * np.exp(-1j * (phi1 - phi2))
        if n == m - 2:
            return c(m) * s(m) * s(m - 1) * c(m + 1) * np.exp(1j * (phi1 - phi2))
        return 0j
    if sector == G_G:
        if n == m:
            return complex(c(m + 1) ** 2 * c(m) ** 2 + (s(m - 1) ** 2 if m >= 1 else 0.0) * s(m) ** 2)
        if n == m + 2:
            return -c(m + 1) * s(m + 1) * c(m) * s(m + 2) * np.exp(-1j * (phi1 - phi2))
        if n == m - 2:
            return -c(m - 1) * s(m - 1) * c(m - 2) * s(m) * np.exp(1j * (phi1 - phi2))
        return 0j
    raise ValueError(f"unknown sector {sector!r}")


def random_parity_locked_state(
    rng: np.random.Generator, n_max: int, support: int = 9
) -> JointState:
    """Random normalized state on the (g,even)/(e,odd) subspace with Fock
    support below `support`."""
    amps = np.zeros((2, n_max + 1), dtype=complex)
    for n in range(min(support, n_max + 1)):
        s = QUBIT_G if n % 2 == 0 else QUBIT_E
        amps[s, n] = rng.normal() + 1j * rng.normal()
    amps /= np.linalg.norm(amps)
    return JointState(amps, n_max)

