"""Sideband and carrier pulse unitaries on the truncated joint space.

A pulse of kind BSB couples |g,n> <-> |e,n+1>; RSB couples
|g,n> <-> |e,n-1>; Carrier couples |g,n> <-> |e,n>.  Each coupled pair
(block) rotates by the mixing angle

    angle_m = (area / 2) * ratio(m),

where the dimensionless area is eta*Omega_0*t, m is the larger Fock
index of the pair (m = n for the carrier), and ratio(m) = sqrt(m) in the
Lamb-Dicke model.  The block unitary in the ordered pair basis
(|g, n_g>, |e, n_e>) is

    [[ cos(angle),           e^{i phi} sin(angle) ],
     [ -e^{-i phi} sin(angle),          cos(angle) ]]

i.e. the element feeding |g> from |e> carries the factor
-i e^{i(phi + pi/2)} = e^{i phi} and its partner the Hermitian
conjugate.  With this assignment the pulse equals
exp[i (A/2) (sigma_+ a e^{-i chi} + sigma_- a^dag e^{i chi})] (RSB, and
the a <-> a^dag analogue for BSB) with chi = phi - pi/2, so qubit and
oscillator phase rotations commute through a pulse as pure shifts of
phi: +theta for either kind, -Theta for RSB and +Theta for BSB.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import CutoffViolationError, NoTransitionError
from .fockspace import (
    LEAK_TOL,
    QUBIT_E,
    QUBIT_G,
    JointDensity,
    JointState,
    dim,
)

RSB = "rsb"
BSB = "bsb"
CARRIER = "carrier"

LAMB_DICKE = "lamb_dicke"
BEYOND_LD = "beyond_ld"

DEFAULT_ETA = 0.0629


@dataclass(frozen=True)
class RabiModel:
    """Coupling-strength model for sideband transitions.

    kind "lamb_dicke": ratio(n -> n+l) = sqrt(n + (l+1)/2), in units of
    eta*Omega_0.  kind "beyond_ld": |<n+l| exp(i eta (a + a^dag)) |n>|,
    in units of Omega_0; eta is required.
    """

    kind: str = LAMB_DICKE
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        if self.kind not in (LAMB_DICKE, BEYOND_LD):
            raise ValueError(f"unknown rabi model kind {self.kind!r}")
        if self.kind == BEYOND_LD and not (0 < self.eta < 1):
            raise ValueError(f"beyond-LD model needs 0 < eta < 1, got {self.eta}")

    def to_json_obj(self) -> dict:
        obj = {"type": self.kind}
        if self.kind == BEYOND_LD:
            obj["eta"] = self.eta
        return obj

    @staticmethod
    def from_json_obj(obj: dict) -> "RabiModel":
        return RabiModel(obj["type"], obj.get("eta", DEFAULT_ETA))


@dataclass(frozen=True)
class PulseSpec:
    """One sideband or carrier pulse: kind, dimensionless area, phase."""

    kind: str
    area: float
    phase: float = 0.0
    rabi_model: RabiModel = RabiModel()

    def __post_init__(self):
        if self.kind not in (RSB, BSB, CARRIER):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if not math.isfinite(self.area) or self.area < 0:
            raise ValueError(f"pulse area must be finite and >= 0, got {self.area}")
        object.__setattr__(self, "phase", float(self.phase) % (2 * math.pi))

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "area": self.area,
            "phase": self.phase,
            "rabi_model": self.rabi_model.to_json_obj(),
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "PulseSpec":
        model = RabiModel.from_json_obj(obj.get("rabi_model", {"type": LAMB_DICKE}))
        return PulseSpec(obj["kind"], obj["area"], obj.get("phase", 0.0), model)


@dataclass(frozen=True)
class PhaseRotation:
    """Local qubit phase theta (via exp[i theta sigma_z / 2]) and
    oscillator phase Theta (via exp[i Theta n])."""

    theta: float = 0.0
    Theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.Theta)):
            raise ValueError("rotation angles must be finite")


@lru_cache(maxsize=64)
def _displacement_column_ratios(eta: float, n_needed: int) -> tuple:
    """|<m| exp(i eta (a+a^dag)) |n>| for all m, per n, on a padded space.

    Returns a read-only array Q with Q[m, n]; truncation dimension is at
    least 3x the requested n plus padding so edge effects are negligible.
    """
    d = max(3 * (n_needed + 1) + 8, 16)
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    disp = expm(1j * eta * (a + a.T))
    q = np.abs(disp)
    q.setflags(write=False)
    return (q, d)


def rabi_frequency(n: int, l: int, model: RabiModel) -> float:
    """Sideband coupling magnitude for |n> -> |n+l| with l = +-1.

    Lamb-Dicke values are in units of eta*Omega_0; beyond-LD values in
    units of Omega_0.
    """
    if l not in (1, -1):
        raise ValueError(f"l must be +1 or -1, got {l}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if l == -1 and n == 0:
        raise NoTransitionError("no red-sideband transition from n=0")
    if model.kind == LAMB_DICKE:
        return math.sqrt(n + (l + 1) / 2)
    q, _ = _displacement_column_ratios(model.eta, n + 1)
    return float(q[n + l, n])


def _pair_ratios(kind: str, n_max: int, model: RabiModel) -> np.ndarray:
    """Mixing-angle ratios per coupled pair.

    For RSB/BSB, entry m-1 is the ratio of the pair whose larger Fock
    index is m (m = 1..n_max); the pulse angle is (area/2) * ratio.
    For the carrier the ratio is 1 for every n (Lamb-Dicke only).
    """
    if kind == CARRIER:
        return np.ones(n_max + 1)
    m = np.arange(1, n_max + 1)
    if model.kind == LAMB_DICKE:
        return np.sqrt(m.astype(float))
    q, _ = _displacement_column_ratios(model.eta, n_max)
    # angle uses Omega_{m-1,m} t / 2 = (A/2) * |<m|D|m-1>| / eta
    return q[m, m - 1] / model.eta


def apply_pulse_batch(
    amps: np.ndarray, kind: str, area: float, phases: np.ndarray, model: RabiModel
) -> np.ndarray:
    """Apply one pulse to a batch of amplitude arrays.

    amps has shape (..., 2, n_max+1); phases broadcasts against the
    leading shape.  Returns a new array; uncoupled amplitudes are copied
    unchanged, so exact zeros stay exact.
    """
    amps = np.asarray(amps, dtype=complex)
    n_max = amps.shape[-1] - 1
    out = amps.copy()
    ratios = _pair_ratios(kind, n_max, model)
    ph = np.exp(1j * np.asarray(phases, dtype=float))[..., None]

    if kind == BSB:
        angles = 0.5 * area * ratios  # pairs (g, m-1) <-> (e, m), m = 1..n_max
        g_old = amps[..., QUBIT_G, : n_max]
        e_old = amps[..., QUBIT_E, 1:]
    elif kind == RSB:
        angles = 0.5 * area * ratios  # pairs (g, m) <-> (e, m-1), m = 1..n_max
        g_old = amps[..., QUBIT_G, 1:]
        e_old = amps[..., QUBIT_E, : n_max]
    elif kind == CARRIER:
        angles = 0.5 * area * ratios
        g_old = amps[..., QUBIT_G, :]
        e_old = amps[..., QUBIT_E, :]
    else:
        raise ValueError(f"unknown pulse kind {kind!r}")

    c = np.cos(angles)
    s = np.sin(angles)
    new_g = c * g_old + ph * s * e_old
    new_e = c * e_old - np.conj(ph) * s * g_old

    if kind == BSB:
        out[..., QUBIT_G, : n_max] = new_g
        out[..., QUBIT_E, 1:] = new_e
    elif kind == RSB:
        out[..., QUBIT_G, 1:] = new_g
        out[..., QUBIT_E, : n_max] = new_e
    else:
        out[..., QUBIT_G, :] = new_g
        out[..., QUBIT_E, :] = new_e
    return out


def apply_pulse(state: JointState, pulse: PulseSpec, check_leak: bool = True) -> JointState:
    """Apply one pulse to a pure state.

    Raises CutoffViolationError if the result carries more than LEAK_TOL
    population in the top two Fock levels.
    """
    new_amps = apply_pulse_batch(
        state.amps, pulse.kind, pulse.area, np.float64(pulse.phase), pulse.rabi_model
    )
    result = JointState(new_amps, state.n_max)
    if check_leak and result.top_population() > LEAK_TOL:
        raise CutoffViolationError(
            f"population {result.top_population():.3e} in top Fock levels exceeds "
            f"{LEAK_TOL:.0e}; increase n_max"
        )
    return result


def apply_pulse_density(rho: JointDensity, pulse: PulseSpec, check_leak: bool = True) -> JointDensity:
    """Unitary conjugation U rho U^dag for one pulse."""
    u = pulse_matrix(pulse, rho.n_max)
    out = u @ rho.matrix @ u.conj().T
    result = JointDensity(out, rho.n_max)
    if check_leak:
        pops = result.populations()
        leak = float(pops[:, rho.n_max - 1 :].sum())
        if leak > LEAK_TOL:
            raise CutoffViolationError(
                f"population {leak:.3e} in top Fock levels exceeds {LEAK_TOL:.0e}"
            )
    return result


def pulse_matrix(pulse: PulseSpec, n_max: int) -> np.ndarray:
    """Dense unitary of a pulse in the flat basis ordering."""
    d = dim(n_max)
    basis = np.eye(d, dtype=complex)
    amps = np.empty((d, 2, n_max + 1), dtype=complex)
    amps[:, QUBIT_G, :] = basis[:, 0::2]
    amps[:, QUBIT_E, :] = basis[:, 1::2]
    moved = apply_pulse_batch(amps, pulse.kind, pulse.area, np.float64(pulse.phase), pulse.rabi_model)
    out = np.empty((d, d), dtype=complex)
    out[0::2, :] = np.swapaxes(moved[:, QUBIT_G, :], 0, 1)
    out[1::2, :] = np.swapaxes(moved[:, QUBIT_E, :], 0, 1)
    return out


def rotation_matrix(rot: PhaseRotation, n_max: int) -> np.ndarray:
    """Dense diagonal unitary exp[i theta sigma_z/2] * exp[i Theta n]."""
    d = dim(n_max)
    idx = np.arange(d)
    s = idx % 2
    n = idx // 2
    qubit_sign = np.where(s == QUBIT_E, 1.0, -1.0)
    phases = np.exp(1j * (0.5 * rot.theta * qubit_sign + rot.Theta * n))
    return np.diag(phases)


def apply_phase_rotation(state: JointState, rot: PhaseRotation) -> JointState:
    """Apply local qubit and oscillator phase rotations to a pure state."""
    n = np.arange(state.n_max + 1)
    osc = np.exp(1j * rot.Theta * n)
    amps = state.amps * osc[None, :]
    amps = amps * np.exp(1j * 0.5 * rot.theta * np.array([-1.0, 1.0]))[:, None]
    return JointState(amps, state.n_max)


# Phase-shift table for the pulse/rotation commutation identities: the
# named identity asserts  U(area, phi) . Rot  ==  Rot . U(area, phi + shift)
# with shift = sign * angle.
IDENTITY_TABLE = {
    "E1_rsb_theta": (RSB, "theta", +1),
    "E2_rsb_Theta": (RSB, "Theta", -1),
    "E3_bsb_theta": (BSB, "theta", +1),
    "E4_bsb_Theta": (BSB, "Theta", +1),
}


def verify_commutation_identity(
    identity: str,
    area: float,
    angle: float,
    n_max: int,
    base_phase: float = 0.0,
    sign_override: int | None = None,
) -> float:
    """Max deviation between the two sides of a pulse/rotation identity.

    Both sides are built as dense matrices and compared on the interior
    block (top two Fock rows/columns excluded, where truncation breaks
    exactness).  sign_override substitutes the tabulated shift sign and
    exists for negative controls.
    """
    kind, which, sign = IDENTITY_TABLE[identity]
    if sign_override is not None:
        sign = sign_override
    rot = PhaseRotation(theta=angle, Theta=0.0) if which == "theta" else PhaseRotation(0.0, angle)
    u = pulse_matrix(PulseSpec(kind, area, base_phase), n_max)
    u_shift = pulse_matrix(PulseSpec(kind, area, base_phase + sign * angle), n_max)
    r = rotation_matrix(rot, n_max)
    left = u @ r
    right = r @ u_shift
    interior = 2 * (n_max - 1)  # flat indices with n <= n_max - 2
    diff = np.abs(left[:interior, :interior] - right[:interior, :interior])
    return float(diff.max())


def sideband_hamiltonian(kind: str, phase: float, n_max: int) -> np.ndarray:
    """Generator H with U(area, phase) = expm(i (area/2) H) in flat ordering.

    Lamb-Dicke couplings; used as an independent construction for
    cross-checks of the block-built pulse matrices.
    """
    d = dim(n_max)
    h = np.zeros((d, d), dtype=complex)
    chi = phase - 0.5 * math.pi
    for m in range(1, n_max + 1):
        ratio = math.sqrt(m)
        if kind == RSB:
            g_idx, e_idx = 2 * m + QUBIT_G, 2 * (m - 1) + QUBIT_E
        elif kind == BSB:
            g_idx, e_idx = 2 * (m - 1) + QUBIT_G, 2 * m + QUBIT_E
        else:
            raise ValueError(f"no Hamiltonian for pulse kind {kind!r}")
        h[e_idx, g_idx] = ratio * np.exp(-1j * chi)
        h[g_idx, e_idx] = ratio * np.exp(1j * chi)
    return h
