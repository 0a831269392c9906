import numpy as np
import pytest

from sidebandcat.errors import NotParityLockedError
from sidebandcat.fockspace import (
    JointState,
    fock_distribution,
    new_ground,
    parity_expectation,
)
from sidebandcat.interferometry import analytic_spectrum, random_parity_locked_state
from sidebandcat.noise import (
    CLASSICAL_MIXTURE,
    FULL_DEPHASE,
    QUBIT_DEPHASE,
    W_MIXTURE,
    W_POWER,
    DecoherenceModel,
    apply_model,
    apply_model_to_density,
    purity,
)
from sidebandcat.preparation import build_half_transfer_sequence, prepare


ALL_KINDS = [W_MIXTURE, W_POWER, QUBIT_DEPHASE, FULL_DEPHASE, CLASSICAL_MIXTURE]


def locked_state(rng, n_max=16, support=7):
    return random_parity_locked_state(rng, n_max, support)


def test_w_mixture_limits(rng):
    st = locked_state(rng)
    pure = apply_model(st, DecoherenceModel(W_MIXTURE, 1.0))
    assert np.max(np.abs(pure.matrix - st.density().matrix)) < 1e-15
    dead = apply_model(st, DecoherenceModel(W_MIXTURE, 0.0))
    off = dead.matrix - np.diag(np.diag(dead.matrix))
    assert np.max(np.abs(off)) == 0.0


def test_w_mixture_zero_kills_single_pulse_contrast(rng):
    from sidebandcat.interferometry import pg_grid, uniform_grid

    st = prepare(build_half_transfer_sequence(4, rng.uniform(0, 2 * np.pi, 4)), 24)
    rho = apply_model(st, DecoherenceModel(W_MIXTURE, 0.0))
    vals = pg_grid(rho, 1.11, 0.0, uniform_grid(16), np.array([0.0]))[:, 0]
    assert np.ptp(vals) < 1e-12


def test_w_power_scales_by_fock_distance():
    amps = np.zeros((2, 9), dtype=complex)
    amps[0, 0] = amps[1, 3] = 1 / np.sqrt(2)
    st = JointState(amps, 8)
    w = 0.7
    rho = apply_model(st, DecoherenceModel(W_POWER, w))
    idx0 = 0          # (g, 0)
    idx3 = 2 * 3 + 1  # (e, 3)
    assert abs(rho.matrix[idx0, idx3]) == pytest.approx(0.5 * w**3, abs=1e-14)


def test_w_power_semigroup(rng):
    st = locked_state(rng)
    w1, w2 = 0.9, 0.8
    a = apply_model_to_density(apply_model(st, DecoherenceModel(W_POWER, w1)),
                               DecoherenceModel(W_POWER, w2))
    b = apply_model(st, DecoherenceModel(W_POWER, w1 * w2))
    assert np.max(np.abs(a.matrix - b.matrix)) < 1e-12


def test_qubit_dephase_structure(rng):
    st = locked_state(rng)
    rho = apply_model(st, DecoherenceModel(QUBIT_DEPHASE))
    assert np.max(np.abs(rho.matrix[0::2, 1::2])) == 0.0
    assert np.max(np.abs(rho.matrix[1::2, 0::2])) == 0.0
    # oscillator coherence within each branch survives
    gg = rho.matrix[0::2, 0::2]
    assert np.max(np.abs(gg - np.diag(np.diag(gg)))) > 1e-3


def test_qubit_dephase_requires_lock():
    amps = np.zeros((2, 9), dtype=complex)
    amps[0, 0] = amps[0, 1] = 1 / np.sqrt(2)  # (g,1) breaks the lock
    with pytest.raises(NotParityLockedError):
        apply_model(JointState(amps, 8), DecoherenceModel(QUBIT_DEPHASE))


def test_classical_mixture_interpolates(rng):
    st = locked_state(rng)
    w = 0.6
    rho = apply_model(st, DecoherenceModel(CLASSICAL_MIXTURE, w))
    pure = st.density().matrix
    deph = apply_model(st, DecoherenceModel(QUBIT_DEPHASE)).matrix
    assert np.max(np.abs(rho.matrix - (w * pure + (1 - w) * deph))) < 1e-14


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_models_preserve_trace_positivity_diagonals(kind, rng):
    st = prepare(build_half_transfer_sequence(6, rng.uniform(0, 2 * np.pi, 6)), 24)
    rho = apply_model(st, DecoherenceModel(kind, 0.73))
    rho.check_valid()
    assert np.allclose(fock_distribution(rho).probs, fock_distribution(st).probs, atol=1e-13)
    assert parity_expectation(rho, "g") == pytest.approx(parity_expectation(st, "g"), abs=1e-12)
    assert parity_expectation(rho, "e") == pytest.approx(parity_expectation(st, "e"), abs=1e-12)


def test_purity_pure_and_mixed():
    st = new_ground(8)
    assert purity(st.density()) == pytest.approx(1.0)
    half = np.zeros((18, 18), dtype=complex)
    half[0, 0] = half[1, 1] = 0.5
    from sidebandcat.fockspace import JointDensity

    assert purity(JointDensity(half, 8)) == pytest.approx(0.5)


def test_purity_w_mixture_closed_form(rng):
    # for M equal-weight components, purity(w) = w^2 + (1 - w^2) / M
    m_comp = 5
    amps = np.zeros((2, 17), dtype=complex)
    for n in range(m_comp):
        amps[n % 2, n] = 1 / np.sqrt(m_comp)
    st = JointState(amps, 16)
    for w in (0.3, 0.9):
        got = purity(apply_model(st, DecoherenceModel(W_MIXTURE, w)))
        want = w**2 + (1 - w**2) / m_comp
        assert got == pytest.approx(want, abs=1e-12)


def test_purity_n8_w09_near_reported(rng):
    st = prepare(build_half_transfer_sequence(8, rng.uniform(0, 2 * np.pi, 8)), 32)
    p = purity(apply_model(st, DecoherenceModel(W_MIXTURE, 0.9)))
    assert 0.79 <= p <= 0.87


def test_fringe_amplitude_linear_in_w(rng):
    st = prepare(build_half_transfer_sequence(5, rng.uniform(0, 2 * np.pi, 5)), 24)
    spectra = {}
    for w in (0.25, 0.5, 1.0):
        rho = apply_model(st, DecoherenceModel(W_MIXTURE, w))
        spectra[w] = analytic_spectrum(rho, 1.11, 0.91)
    ref = spectra[1.0]
    for w in (0.25, 0.5):
        for kl in ref.harmonics:
            assert spectra[w].A[kl] == pytest.approx(w * ref.A[kl], abs=1e-14)
            assert spectra[w].B[kl] == pytest.approx(w * ref.B[kl], abs=1e-14)
