import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threespin.dynamics import lindblad_rhs, propagate_rk4
from threespin.errors import BlockLeakage, DimensionMismatch, DomainError
from threespin.liouvillian import (
    Superoperator,
    assemble,
    block_pairs,
    conjugate_transform,
    contained_distance,
    cross_block_leakage,
    lindbladian,
    mpm_expected_spectrum,
    mpp_charpoly,
    mpp_charpoly_roots,
    multiset_distance,
    omega_eigenvalues,
    relaxation_times,
    split_blocks,
    unvec,
    vec,
)
from threespin.model import ModelParams, build_bath_operators, build_hamiltonian, initial_state

from conftest import FIG5, GRID

params_strategy = st.builds(
    ModelParams,
    theta=st.floats(0, 2 * math.pi),
    epsilon=st.floats(0.01, 2),
    mu=st.floats(-1, 1),
)


def random_state(rng):
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_vectorization_is_row_major():
    rho = np.arange(64).reshape(8, 8)
    assert vec(rho)[8 * 2 + 5] == rho[2, 5]
    np.testing.assert_array_equal(unvec(vec(rho)), rho)


def test_closed_system_spectrum():
    p = ModelParams(math.pi / 2, 0.0)
    s = lindbladian(p)
    energies = np.linalg.eigvalsh(build_hamiltonian(p))
    expected = (-1j * (energies[:, None] - energies[None, :])).ravel()
    assert multiset_distance(expected, np.linalg.eigvals(s.matrix)) < 1e-10


def test_trace_row_vanishes():
    s = lindbladian(ModelParams(math.pi / 2, 0.1, 0.3))
    assert np.max(np.abs(s.trace_row())) < 1e-12


def test_assemble_matches_direct_rhs_and_one_rk4_step():
    p = ModelParams(math.pi / 3, 0.2, -0.4)
    h, ls = build_hamiltonian(p), build_bath_operators(p)
    s = assemble(h, ls)
    rho0 = initial_state()
    np.testing.assert_allclose(s.apply(rho0), lindblad_rhs(h, ls, rho0), atol=1e-14)
    dt = 1e-4
    k1 = lindblad_rhs(h, ls, rho0)
    k2 = lindblad_rhs(h, ls, rho0 + dt / 2 * k1)
    k3 = lindblad_rhs(h, ls, rho0 + dt / 2 * k2)
    k4 = lindblad_rhs(h, ls, rho0 + dt * k3)
    oracle = rho0 + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    step = propagate_rk4(s, rho0, dt, dt, 1).states[-1]
    assert np.max(np.abs(step - oracle)) < 1e-15


def test_assemble_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        assemble(np.eye(4), [])


@settings(max_examples=30, deadline=None)
@given(params_strategy, st.integers(0, 2**32 - 1))
def test_trace_and_hermiticity_preservation(p, seed):
    s = lindbladian(p)
    rho = random_state(np.random.default_rng(seed))
    d = s.apply(rho)
    assert abs(np.trace(d)) < 1e-12
    np.testing.assert_allclose(d, d.conj().T, atol=1e-12)


def test_block_split_examples():
    p = ModelParams(math.pi / 2, 0.1, -1.0)
    b = split_blocks(lindbladian(p))
    assert b.leakage == 0.0
    mpp_neg = split_blocks(lindbladian(ModelParams(-math.pi / 2, 0.1, -1.0))).mpp
    assert np.max(np.abs(b.mmm - mpp_neg)) <= 1e-14
    lam = np.linalg.eigvals(b.mpp)
    assert np.min(np.abs(lam)) < 1e-12
    assert np.min(np.abs(lam + 0.4)) < 1e-8


def test_block_index_maps():
    assert block_pairs("+-")[0] == (0, 4)
    assert block_pairs("-+")[-1] == (7, 3)
    assert len(set(sum((block_pairs(n) for n in ("++", "--", "+-", "-+")), []))) == 64


def test_block_leakage_detected():
    s = lindbladian(ModelParams(1.0, 0.2, 0.1)).matrix.copy()
    s[0, 4] = 1e-6  # (1,1) row fed by (1,5)
    with pytest.raises(BlockLeakage):
        split_blocks(Superoperator(s))


@settings(max_examples=30, deadline=None)
@given(params_strategy)
def test_block_structure_properties(p):
    s = lindbladian(p)
    assert cross_block_leakage(s) <= 1e-14
    b = split_blocks(s)
    flipped = split_blocks(lindbladian(ModelParams(-p.theta, p.epsilon, p.mu))).mpp
    assert np.max(np.abs(b.mmm - flipped)) <= 1e-14
    assert np.max(np.abs(b.mmp - conjugate_transform(b.mpm))) <= 1e-14
    assert multiset_distance(np.linalg.eigvals(b.mpp), np.linalg.eigvals(b.mmm)) < 1e-7


def test_mpp_roots_closed_system():
    roots = mpp_charpoly_roots(ModelParams(0.0, 0.0, 0.0))
    expected = [0, 1j, -1j, 0, 0, 0, 0, 0] + [0.5j, -0.5j] * 4
    assert multiset_distance(expected, roots) < 1e-14


def test_mpp_roots_against_numeric_and_trace():
    p = ModelParams(math.pi / 2, 0.1, 0.0)
    mpp = split_blocks(lindbladian(p)).mpp
    roots = mpp_charpoly_roots(p)
    assert multiset_distance(roots, np.linalg.eigvals(mpp)) < 1e-8
    assert abs(roots.sum() - np.trace(mpp)) < 1e-10
    for r in roots:
        assert abs(mpp_charpoly(p, r)) < 1e-12


def test_omegas_closed_system_degenerate():
    for mu, th in [(0.0, 0.3), (0.5, 2.0), (-1.0, math.pi)]:
        om = omega_eigenvalues(ModelParams(th, 0.0, mu))
        assert om.degenerate
        assert multiset_distance(om.omegas, [0, 0, 1j, -1j]) < 1e-12


def test_omegas_fig5_in_mpm_spectrum():
    om = omega_eigenvalues(FIG5)
    assert not om.degenerate
    assert list(om.omegas.real) == sorted(om.omegas.real)
    lam = np.linalg.eigvals(split_blocks(lindbladian(FIG5)).mpm)
    for w in om.omegas:
        assert np.min(np.abs(lam - w)) < 1e-8


def test_zetas_double_in_mpm_spectrum():
    p = ModelParams(math.pi / 2, 0.1, -1.0)
    lam = np.linalg.eigvals(split_blocks(lindbladian(p)).mpm)
    assert multiset_distance(mpm_expected_spectrum(p), lam) < 1e-8
    for z in omega_eigenvalues(p).zetas:
        assert np.sum(np.abs(lam - z) < 1e-7) == 2


@settings(max_examples=30, deadline=None)
@given(params_strategy)
def test_omega_real_parts_nonpositive(p):
    om = omega_eigenvalues(p)
    assert np.all(om.omegas.real <= 1e-12)
    lam = np.linalg.eigvals(split_blocks(lindbladian(p)).mpm)
    assert contained_distance(om.omegas, lam) < 1e-6


def test_relaxation_times():
    _, t_cur = relaxation_times(ModelParams(math.pi / 2, 0.1, 0.0))
    assert t_cur == pytest.approx(5.0)
    t_reg, _ = relaxation_times(FIG5)
    rate = abs(max(omega_eigenvalues(FIG5).omegas.real))
    assert t_reg == pytest.approx(1 / rate)
    with pytest.raises(DomainError):
        relaxation_times(ModelParams(math.pi / 2, 0.0))
    for p in GRID:
        t_reg, _ = relaxation_times(p)
        if p.theta != 0.0:
            assert 0 < t_reg < math.inf


def test_register_relaxation_infinite_for_trivial_primitive():
    # with U = I the register decouples and one omega is exactly 0
    t_reg, _ = relaxation_times(ModelParams(0.0, 0.3, 0.2))
    assert t_reg == math.inf


def test_mpm_charpoly_examples():
    from threespin.liouvillian import verify_mpm_charpoly

    p = ModelParams(math.pi / 2, 0.1, -1.0)
    assert verify_mpm_charpoly(p, [1, 1j, -0.2]) < 1e-8
    lam = np.linalg.eigvals(split_blocks(lindbladian(p)).mpm)
    assert verify_mpm_charpoly(p, lam) < 1e-8
    assert verify_mpm_charpoly(ModelParams(0.7, 0.0, 0.3), [1, 1j, 0.5 - 2j, 3.0]) < 1e-10


def test_diagonal_blocks_carry_zero_eigenvalue():
    for p in GRID:
        b = split_blocks(lindbladian(p))
        for m in (b.mpp, b.mmm):
            assert np.min(np.abs(np.linalg.eigvals(m))) < 1e-10
        if p.theta != 0.0:
            for m in (b.mpm, b.mmp):
                assert np.min(np.abs(np.linalg.eigvals(m))) > 1e-3


def test_offdiagonal_blocks_singular_when_primitive_trivial():
    # theta = 0: register and cursor decouple, so M+- has a zero mode as well
    b = split_blocks(lindbladian(ModelParams(0.0, 0.5, 0.7)))
    assert np.min(np.abs(np.linalg.eigvals(b.mpm))) < 1e-10
    assert np.min(np.abs(omega_eigenvalues(ModelParams(0.0, 0.5, 0.7)).omegas)) < 1e-12
