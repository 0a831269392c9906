import numpy as np
import pytest

from sidebandcat.errors import (
    DimensionMismatchError,
    InvalidCutoffError,
    UndefinedConditionalError,
)
from sidebandcat.fockspace import (
    JointDensity,
    JointState,
    fock_distribution,
    new_ground,
    overlap,
    parity_expectation,
    reduce_oscillator,
)
from sidebandcat.interferometry import random_parity_locked_state
from sidebandcat.preparation import build_half_transfer_sequence, prepare


def test_new_ground_is_delta():
    st = new_ground(20)
    dist = fock_distribution(st)
    assert dist.probs[0] == 1.0
    assert np.all(dist.probs[1:] == 0.0)
    assert dist.mean == 0.0 and dist.std == 0.0
    assert float(np.sum(np.abs(st.amps[0]) ** 2)) == 1.0
    assert parity_expectation(st) == 1.0


def test_new_ground_invalid_cutoff():
    with pytest.raises(InvalidCutoffError):
        new_ground(1)


def test_fock_distribution_equal_superposition():
    amps = np.zeros((2, 9), dtype=complex)
    amps[0, 0] = amps[1, 1] = 1 / np.sqrt(2)
    dist = fock_distribution(JointState(amps, 8))
    assert dist.probs[0] == pytest.approx(0.5)
    assert dist.probs[1] == pytest.approx(0.5)
    assert dist.mean == pytest.approx(0.5)


def test_conditional_parity_locked_exact():
    st = prepare(build_half_transfer_sequence(6, np.linspace(0, 5, 6)), 24)
    assert parity_expectation(st, "g") == 1.0
    assert parity_expectation(st, "e") == -1.0


def test_conditional_parity_zero_probability():
    st = new_ground(8)
    with pytest.raises(UndefinedConditionalError):
        parity_expectation(st, "e")


def test_dephasing_preserves_conditional_parity(rng):
    from sidebandcat.noise import DecoherenceModel, FULL_DEPHASE, apply_model

    st = prepare(build_half_transfer_sequence(4, rng.uniform(0, 2 * np.pi, 4)), 24)
    rho = apply_model(st, DecoherenceModel(FULL_DEPHASE))
    assert parity_expectation(rho, "g") == pytest.approx(1.0, abs=1e-14)
    assert parity_expectation(rho, "e") == pytest.approx(-1.0, abs=1e-14)


def test_reduce_oscillator_product_state():
    rho = new_ground(8).density()
    osc = reduce_oscillator(rho)
    want = np.zeros((9, 9))
    want[0, 0] = 1.0
    assert np.allclose(osc, want)


def test_reduce_oscillator_correlated_mixture():
    d = np.zeros((18, 18), dtype=complex)
    d[0, 0] = 0.5       # |g,0><g,0|
    d[3, 3] = 0.5       # |e,1><e,1|
    osc = reduce_oscillator(JointDensity(d, 8))
    assert osc[0, 0] == pytest.approx(0.5)
    assert osc[1, 1] == pytest.approx(0.5)
    assert np.sum(np.abs(osc)) == pytest.approx(1.0)


def test_reduced_purity_bounded(rng):
    for _ in range(10):
        st = random_parity_locked_state(rng, 12, support=7)
        osc = reduce_oscillator(st.density())
        p = float(np.real(np.trace(osc @ osc)))
        assert p <= 1.0 + 1e-12
    # product state saturates the bound
    osc = reduce_oscillator(new_ground(12).density())
    assert float(np.real(np.trace(osc @ osc))) == pytest.approx(1.0)


def test_overlap_orthogonal_and_norm():
    g0 = new_ground(10)
    amps = np.zeros((2, 11), dtype=complex)
    amps[1, 1] = 1.0
    e1 = JointState(amps, 10)
    assert overlap(g0, e1) == 0.0
    assert overlap(g0, g0) == pytest.approx(1.0)


def test_overlap_cutoff_mismatch():
    with pytest.raises(DimensionMismatchError):
        overlap(new_ground(10), new_ground(12))


def test_state_json_roundtrip_bit_faithful(rng):
    st = random_parity_locked_state(rng, 10, support=8)
    back = JointState.from_json(st.to_json())
    assert np.array_equal(back.amps, st.amps)
    assert back.n_max == st.n_max


def test_density_json_roundtrip(rng):
    st = random_parity_locked_state(rng, 6, support=5)
    rho = st.density()
    back = JointDensity.from_json(rho.to_json())
    assert np.array_equal(back.matrix, rho.matrix)


def test_flat_ordering_interleaves_qubit():
    st = new_ground(4)
    flat = st.flat()
    assert flat[0] == 1.0  # (g, 0) at index 0 = 2*0 + 0
    assert len(flat) == 10


def test_density_invariants(rng):
    st = random_parity_locked_state(rng, 10, support=8)
    rho = st.density()
    rho.check_valid()
    assert rho.hermiticity_defect() <= 1e-12
    assert abs(rho.trace - 1.0) <= 1e-9
    assert rho.min_eigenvalue() >= -1e-10


def test_overlap_route_reproduces_single_pulse_pg(rng):
    # P_g after a verification pulse equals the summed squared overlaps
    # with the pulled-back ground basis states
    from sidebandcat.sideband import BSB, PulseSpec, apply_pulse, pulse_matrix
    from sidebandcat.preparation import build_sequence, prepare

    t1, tb, varphi, phi = rng.uniform(0.2, 2 * np.pi, 4)
    psi = prepare(build_sequence([t1], [varphi]), 12)
    u = pulse_matrix(PulseSpec(BSB, tb, phi), 12)
    total = 0.0
    for n in range(13):
        m_n = JointState.from_flat(u.conj().T[:, 2 * n], 12)
        total += abs(overlap(m_n, psi)) ** 2
    closed = 0.5 * (1 + np.cos(t1) * np.cos(tb)
                    - np.sin(t1) * np.sin(tb) * np.cos(varphi - phi))
    assert total == pytest.approx(closed, abs=1e-12)
