"""Numerical validation suite: operator identities, POVM equivalence,
parity lock, and cutoff sufficiency.  Used by the `validate` CLI command
and by the acceptance tests."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fockspace import parity_expectation
from .interferometry import (
    BSB_VERIFICATION_AREA,
    RSB_VERIFICATION_AREA,
    fringe_offset,
    measure_pg,
    pg_grid,
    povm_ground,
    random_parity_locked_state,
    uniform_grid,
)
from .noise import DecoherenceModel, W_MIXTURE, apply_model
from .preparation import build_sequence, prepare
from .sideband import (
    IDENTITY_TABLE,
    PhaseRotation,
    apply_phase_rotation,
    verify_commutation_identity,
)

IDENTITY_TOL = 1e-10
POVM_TOL = 1e-10
OFFSET_TOL = 1e-6
CUTOFF_TOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} (tol {self.threshold:.0e}) {self.detail}"


def run_identity_checks(
    n_max: int = 40, draws: int = 20, seed: int = 0, sign_table: dict | None = None
) -> list[CheckResult]:
    """Interior-block deviation of each named pulse/rotation identity over
    random (area, angle) draws.  sign_table overrides the tabulated phase
    shifts (negative-control hook)."""
    rng = np.random.default_rng(seed)
    out = []
    for name in IDENTITY_TABLE:
        worst = 0.0
        for _ in range(draws):
            area = rng.uniform(0.1, 2 * math.pi)
            angle = rng.uniform(0.1, 2 * math.pi)
            override = None if sign_table is None else sign_table.get(name)
            dev = verify_commutation_identity(
                name, area, angle, n_max, sign_override=override
            )
            worst = max(worst, dev)
        out.append(CheckResult(f"identity {name}", worst < IDENTITY_TOL, worst, IDENTITY_TOL))
    return out


def run_offset_checks(seed: int = 0, n_max: int = 24) -> list[CheckResult]:
    """Fringe-shift signs for oscillator rotations: the single-RSB fringe
    of a Theta-rotated state shifts by +Theta, the single-BSB fringe by
    -Theta (opposite signs)."""
    rng = np.random.default_rng(seed)
    state = prepare(build_sequence(rng.uniform(0.4, 2.0, 4), rng.uniform(0, 2 * math.pi, 4)), n_max)
    theta_cap = rng.uniform(0.3, 2.0)
    rotated = apply_phase_rotation(state, PhaseRotation(0.0, theta_cap))
    grid = uniform_grid(64)
    out = []
    for kind, sign in (("rsb", +1.0), ("bsb", -1.0)):
        if kind == "rsb":
            base = pg_grid(state, RSB_VERIFICATION_AREA, 0.0, grid, np.array([0.0]))[:, 0]
            rot = pg_grid(rotated, RSB_VERIFICATION_AREA, 0.0, grid, np.array([0.0]))[:, 0]
        else:
            base = pg_grid(state, 0.0, BSB_VERIFICATION_AREA, np.array([0.0]), grid)[0, :]
            rot = pg_grid(rotated, 0.0, BSB_VERIFICATION_AREA, np.array([0.0]), grid)[0, :]
        shift = (fringe_offset(grid, rot) - fringe_offset(grid, base)) % (2 * math.pi)
        want = (sign * theta_cap) % (2 * math.pi)
        err = abs((shift - want + math.pi) % (2 * math.pi) - math.pi)
        out.append(
            CheckResult(
                f"fringe shift {kind} (sign {int(sign):+d})", err < OFFSET_TOL, err, OFFSET_TOL
            )
        )
    return out


def run_povm_checks(count: int = 100, seed: int = 0, n_max: int = 24) -> list[CheckResult]:
    """trace(Pi rho) against direct evolution for random parity-locked
    densities, plus the single-pulse reduction Pi2 = Pi3 = 0."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        state = random_parity_locked_state(rng, n_max, support=9)
        rho = apply_model(state, DecoherenceModel(W_MIXTURE, rng.uniform(0.2, 1.0)))
        t1, t2 = rng.uniform(0.3, 2.5, 2)
        p1, p2 = rng.uniform(0, 2 * math.pi, 2)
        parts = povm_ground(t1, t2, p1, p2, n_max)
        via_povm = float(np.real(np.trace(parts.total @ rho.matrix)))
        direct = measure_pg(rho, t1, t2, p1, p2)
        worst = max(worst, abs(via_povm - direct))
    out = [CheckResult("povm equivalence", worst < POVM_TOL, worst, POVM_TOL)]
    parts = povm_ground(1.3, 0.0, 0.7, 1.9, n_max)
    reduction = max(float(np.abs(parts.pi2).max()), float(np.abs(parts.pi3).max()))
    out.append(CheckResult("povm single-pulse reduction", reduction == 0.0, reduction, 0.0))
    return out


def run_parity_checks(count: int = 1000, seed: int = 0, n_max: int = 32) -> list[CheckResult]:
    """Exact parity lock over random sequences (N in 1..12, random areas
    and phases): off-lock amplitudes identically zero and conditional
    parities exactly +-1."""
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(count):
        n = int(rng.integers(1, 13))
        st = prepare(
            build_sequence(rng.uniform(0, 2 * math.pi, n), rng.uniform(0, 2 * math.pi, n)), n_max
        )
        if np.any(st.amps[0, 1::2] != 0) or np.any(st.amps[1, 0::2] != 0):
            ok = False
            break
        if parity_expectation(st, "g") != 1.0 or parity_expectation(st, "e") != -1.0:
            ok = False
            break
    return [CheckResult("parity lock exact", ok, 0.0 if ok else 1.0, 0.0)]


def run_cutoff_checks(seed: int = 0) -> list[CheckResult]:
    """Doubling the cutoff changes a sanctioned P_g by < 1e-8."""
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0, 2 * math.pi, 8)
    vals = []
    for n_max in (32, 64):
        st = prepare(build_sequence(np.full(8, math.pi / 2), phases), n_max)
        vals.append(
            measure_pg(st, RSB_VERIFICATION_AREA, BSB_VERIFICATION_AREA, 0.7, 1.3)
        )
    dev = abs(vals[0] - vals[1])
    return [CheckResult("cutoff sufficiency", dev < CUTOFF_TOL, dev, CUTOFF_TOL)]


def run_validation(quick: bool = False, seed: int = 0) -> list[CheckResult]:
    """Full validation suite; `quick` shrinks the draw counts."""
    draws = 5 if quick else 20
    povm_count = 20 if quick else 100
    parity_count = 200 if quick else 1000
    results = []
    results += run_identity_checks(n_max=40, draws=draws, seed=seed)
    results += run_offset_checks(seed=seed)
    results += run_povm_checks(count=povm_count, seed=seed)
    results += run_parity_checks(count=parity_count, seed=seed)
    results += run_cutoff_checks(seed=seed)
    return results
