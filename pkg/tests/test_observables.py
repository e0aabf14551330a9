import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threespin.dynamics import propagate_expm, propagate_unitary, sample_times
from threespin.errors import DimensionMismatch, IdentityViolation, NotAState
from threespin.liouvillian import lindbladian
from threespin.model import (
    ModelParams,
    build_chirality_operator,
    build_current_operator,
    build_hamiltonian,
    initial_state,
    register_operator,
)
from threespin.observables import (
    REAL_CHANNELS,
    bloch_vector,
    chirality_mean,
    current,
    expectation,
    joint_distribution,
    observable_columns,
    observable_record,
    partial_trace_cursor,
    partial_trace_register,
    register_coherence,
    von_neumann_entropy,
)

RHO0 = initial_state()


def random_state(seed, rank=8):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(8, rank)) + 1j * rng.normal(size=(8, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_expectation_identity_and_shape_guard():
    assert expectation(RHO0, np.eye(8)) == pytest.approx(1)
    with pytest.raises(DimensionMismatch):
        expectation(RHO0, np.eye(4))
    with pytest.raises(DimensionMismatch):
        expectation(np.eye(4), np.eye(8))


def test_joint_distribution_initial_state():
    d = joint_distribution(RHO0)
    assert d["pm"] == pytest.approx(1)
    assert d["pp"] == d["mp"] == d["mm"] == 0


def test_joint_distribution_sums_to_one():
    d = joint_distribution(random_state(3))
    assert sum(d.values()) == pytest.approx(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_bloch_vector_matches_coherence(seed):
    # register Paulis in the e-basis: sigma_2 gives Im m, sigma_3 gives Re m
    rho = random_state(seed)
    m1, m2, m3 = bloch_vector(rho)
    m = register_coherence(rho)
    assert m2 == pytest.approx(m.imag, abs=1e-12)
    assert m3 == pytest.approx(m.real, abs=1e-12)
    red = partial_trace_register(rho)
    assert m1 == pytest.approx((red[0, 0] - red[1, 1]).real, abs=1e-12)
    assert m1**2 + m2**2 + m3**2 <= 1 + 1e-12


def test_partial_traces_against_loops():
    rho = random_state(11)
    reg = np.zeros((2, 2), complex)
    cur = np.zeros((4, 4), complex)
    for r in range(2):
        for s in range(2):
            for k in range(4):
                reg[r, s] += rho[4 * r + k, 4 * s + k]
    for j in range(4):
        for k in range(4):
            cur[j, k] = sum(rho[4 * r + j, 4 * r + k] for r in range(2))
    np.testing.assert_allclose(partial_trace_register(rho), reg, atol=1e-15)
    np.testing.assert_allclose(partial_trace_cursor(rho), cur, atol=1e-15)


def test_register_reduced_state_reproduces_sigma_expectations():
    rho = random_state(5)
    red = partial_trace_register(rho)
    for a, val in zip((1, 2, 3), bloch_vector(rho)):
        small = register_operator(f"sigma{a}")[::4, ::4]
        assert np.trace(red @ small).real == pytest.approx(val, abs=1e-12)


def test_entropy_cases():
    assert von_neumann_entropy(RHO0) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(np.eye(8) / 8) == pytest.approx(math.log(8))
    assert von_neumann_entropy(np.diag([0.5, 0.5])) == pytest.approx(math.log(2))
    stacked = von_neumann_entropy(np.array([np.eye(2) / 2, np.diag([1.0, 0.0])]))
    np.testing.assert_allclose(stacked, [math.log(2), 0], atol=1e-15)


def test_entropy_rejects_non_states():
    with pytest.raises(NotAState):
        von_neumann_entropy(np.diag([1.2, -0.2]))
    with pytest.raises(NotAState):
        von_neumann_entropy(np.array([[0.5, 0.3], [0.0, 0.5]]))
    with pytest.raises(NotAState):
        von_neumann_entropy(np.diag([0.5, 0.4]))
    with pytest.raises(NotAState):
        von_neumann_entropy(np.ones(3))


def test_entropy_clips_tiny_negative_eigenvalues():
    assert von_neumann_entropy(np.diag([1.0 + 1e-11, -1e-11])) == pytest.approx(0, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_entropy_bounds(seed, rank):
    s = von_neumann_entropy(random_state(seed, rank))
    assert -1e-12 <= s <= math.log(rank) + 1e-9


def test_chirality_shortcut_and_violation():
    times = sample_times(8, 0.5)
    states = propagate_expm(lindbladian(ModelParams(0.8, 0.2, -0.4)), RHO0, times).states
    full = np.real(np.einsum("tjk,kj->t", states, build_chirality_operator()))
    np.testing.assert_allclose(chirality_mean(states), full, atol=1e-14)
    np.testing.assert_allclose(full, 8 * states[:, 1, 6].imag, atol=1e-12)
    with pytest.raises(IdentityViolation):
        chirality_mean(random_state(2))
    chirality_mean(random_state(2), check=False)


def test_current_matches_operator():
    rho = random_state(9)
    assert current(rho) == pytest.approx(np.trace(rho @ build_current_operator()).real)


def test_closed_system_isoentropic():
    p = ModelParams(1.3)
    times = sample_times(2 * math.pi, 0.1)
    cols = observable_columns(times, propagate_unitary(build_hamiltonian(p), RHO0, times).states)
    assert np.max(np.abs(cols["s_tot"])) < 1e-7
    assert np.max(np.abs(cols["s_reg"] - cols["s_cur"])) < 1e-7
    assert np.max(np.abs(cols["m1"])) < 1e-10


def test_current_scales_with_cos_half_theta():
    t = np.array([0.3, 1.1, 2.0])
    base = observable_columns(t, propagate_expm(lindbladian(ModelParams(0.0, 0.2, 0.5)), RHO0, t).states)
    for th in (math.pi / 3, 2.0):
        cols = observable_columns(t, propagate_expm(lindbladian(ModelParams(th, 0.2, 0.5)), RHO0, t).states)
        np.testing.assert_allclose(cols["current"], math.cos(th / 2) * base["current"], atol=1e-12)


def test_m1_vanishes_in_open_system():
    t = sample_times(20, 0.5)
    cols = observable_columns(t, propagate_expm(lindbladian(ModelParams(0.7, 0.3, -0.6)), RHO0, t).states)
    assert np.max(np.abs(cols["m1"])) < 1e-10


def test_observable_record_channels():
    rec = observable_record(RHO0, 0.0)
    assert set(rec.as_dict()) == {"t", *REAL_CHANNELS}
    assert rec.n3L == 1 and rec.m3 == pytest.approx(-1) and rec.joint_pm == 1
    assert rec.chirality == 0 and rec.s_tot == pytest.approx(0, abs=1e-12)
