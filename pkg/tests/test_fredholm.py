import numpy as np
import pytest

from conftest import random_potential, random_spectral
from invspec import (Order, SpectralData, det_truncated, f_matrix, forward_map, scan_halfplane,
                     solve_system)
from invspec.analytic import e_vector, k_vector
from invspec.errors import InputError, SingularMatrixError


def rank_one_m1(value: complex) -> SpectralData:
    return SpectralData(Order(1), 1, np.array([[value]], dtype=complex))


def closed_form_m1(value: complex, z: complex) -> complex:
    return 1 + 1j * value / 2 * np.exp(1j * z)


def test_zero_data_determinant_is_one():
    s = SpectralData.zeros(Order(2), 6)
    for z in (0.0, 1.0 + 2j, 5.5j):
        report = det_truncated(s, z)
        assert report.final == pytest.approx(1.0)
        assert report.converged


def test_f_matrix_m1_entry_formula():
    s = SpectralData(Order(1), 2, np.array([[0.2], [0.1j]], dtype=complex))
    z = 0.3 + 0.4j
    f = f_matrix(s, z, 2, mode="z")
    for r in (1, 2):
        for n in (1, 2):
            expected = -1j * s.entry(n, 1) * np.exp(1j * n * z) / (n + r)
            assert f[r - 1, n - 1] == pytest.approx(expected)


def test_rank_one_closed_form_and_truncation_stability():
    value = 0.4 - 0.2j
    s = rank_one_m1(value)
    for z in (0.0, 1.2 + 0.5j, 4.0 + 3j):
        report = det_truncated(s, z)
        assert abs(report.final - closed_form_m1(value, z)) <= 1e-12
        assert report.converged
        assert len(set(np.round(report.values, 14))) == 1


def test_determinant_approaches_one_high_in_the_plane():
    s = rank_one_m1(1.0)
    report = det_truncated(s, 30j)
    assert abs(report.final - 1.0) < 1e-8


def test_determinant_rejects_lower_half_plane():
    with pytest.raises(InputError):
        det_truncated(rank_one_m1(0.1), -1j)


def test_t_and_z_modes_share_determinants(rng):
    for m in (1, 2):
        s = random_spectral(Order(m), 4, rng, scale=0.3)
        for t in (0.0, 0.7, 1.4):
            side = 4 * (2 * m - 1)
            dt = np.linalg.det(np.eye(side) - f_matrix(s, t, 4, mode="t"))
            dz = np.linalg.det(np.eye(side) - f_matrix(s, 1j * t, 4, mode="z"))
            assert abs(dt - dz) <= 1e-12 * max(1.0, abs(dz))


def test_determinant_periodicity(rng):
    s = random_spectral(Order(2), 5, rng)
    for z in (0.3 + 0.2j, 1.7 + 1j):
        d1 = det_truncated(s, z).final
        d2 = det_truncated(s, z + 2 * np.pi).final
        assert abs(d1 - d2) <= 1e-10


def test_truncation_trace_decreases_for_geometric_data():
    table = (0.5 * 2.0 ** -np.arange(1, 33))[:, None].astype(complex)
    s = SpectralData(Order(1), 32, table)
    report = det_truncated(s, 0.4 + 0.1j, n_max=32, dense_trace=True)
    gaps = np.abs(np.diff(report.values))
    assert gaps[-1] <= 1e-10
    assert gaps[-1] < gaps[0]
    assert report.converged


def test_scan_zero_data():
    s = SpectralData.zeros(Order(1), 4)
    report = scan_halfplane(s, np.linspace(0, 2 * np.pi, 9), np.linspace(0, 5, 6))
    assert report.min_modulus == pytest.approx(1.0)
    assert report.zero_free
    assert report.winding == 0


def test_scan_small_rank_one_zero_free():
    value = 0.8
    s = rank_one_m1(value)
    report = scan_halfplane(s, np.linspace(0, 2 * np.pi, 17), np.linspace(0, 8, 9))
    assert report.zero_free
    # |1 + i s e^{iz}/2| >= 1 - |s|/2 on the closed half plane
    assert report.min_modulus >= 1 - abs(value) / 2 - 1e-12


def test_scan_planted_zero_has_winding_one():
    # data chosen so 1 + i S e^{iz}/2 vanishes at z = pi + i, inside the window
    s = rank_one_m1(-2 * np.e * 1j)
    report = scan_halfplane(s, np.linspace(0, 2 * np.pi, 33), np.linspace(0, 10, 21))
    assert report.winding == 1
    assert not report.zero_free


def test_scan_flags_forced_truncation():
    table = (0.8 ** np.arange(1, 21))[:, None].astype(complex)
    s = SpectralData(Order(1), 20, table)
    report = scan_halfplane(s, np.linspace(0, 2 * np.pi, 5), np.linspace(0, 2, 3),
                            n_max=5, det_tol=1e-12)
    assert len(report.flagged) > 0


def test_solve_system_trivial_cases():
    s = SpectralData.zeros(Order(1), 3)
    assert np.allclose(solve_system(s, np.zeros(3)), 0.0)
    e1 = np.zeros(3)
    e1[0] = 1.0
    assert np.allclose(solve_system(s, e1), e1)


def test_solve_system_reproduces_moment_vector(rng):
    # two routes to the t = 0 moment vector agree up to the truncation tail
    from invspec.fredholm import f_matrix as fmat

    for m in (1, 2):
        p = random_potential(Order(m), 8, rng, scale=0.02)
        v, s = forward_map(p)
        f0 = fmat(s, 0.0, 8, mode="z")
        g = solve_system(s, f0 @ e_vector(Order(m), 8, 0.0))
        k0 = k_vector(v, 0.0, 8)
        assert np.abs(g - k0).max() <= 1e-9


def test_solve_mirrors_vanishing_determinant():
    # rank-one data with D(0) = 0: 1 + i s/2 = 0 at s = 2i
    s = rank_one_m1(2j)
    assert abs(det_truncated(s, 0.0).final) < 1e-14
    with pytest.raises(SingularMatrixError):
        solve_system(s, np.ones(1), tol=1e-10)


def test_scan_consistency_with_round_trip_data(rng):
    for m in (1, 2):
        p = random_potential(Order(m), 6, rng)
        _, s = forward_map(p)
        report = scan_halfplane(s, np.linspace(0, 2 * np.pi, 13), np.linspace(0, 10, 9))
        assert report.zero_free
        assert report.min_modulus > 0.5
