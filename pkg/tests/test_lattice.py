import numpy as np
import pytest

from solcusp.lattice import (
    AffineMap3,
    AnosovMatrix,
    SolLattice,
    build_sol_lattice,
    cross_section_volume,
    default_samples,
    verify_isometry,
)

# log of the larger root of x^2 - 3x + 1 = 0
L_211 = float(np.log((3.0 + np.sqrt(5.0)) / 2.0))


def test_stretch_of_standard_anosov():
    assert abs(AnosovMatrix(2, 1, 1, 1).stretch - L_211) <= 1e-12


@pytest.mark.parametrize("entries", [(1, 1, 0, 1), (0, 1, -1, 0), (1, 0, 0, 1)])
def test_non_hyperbolic_matrices_rejected(entries):
    with pytest.raises(ValueError, match="trace"):
        AnosovMatrix(*entries)


def test_non_unimodular_matrix_rejected():
    with pytest.raises(ValueError, match="determinant"):
        AnosovMatrix(2, 0, 0, 1)


def test_monodromy_generator_form():
    lat = build_sol_lattice(AnosovMatrix(2, 1, 1, 1))
    mono = lat.generators[2]
    L = lat.stretch
    expect = np.diag([np.exp(L), np.exp(-L), 1.0])
    assert np.allclose(mono.linear, expect, rtol=0.0, atol=1e-14)
    assert np.allclose(mono.offset, [0.0, 0.0, L], rtol=0.0, atol=1e-14)


def test_generators_are_isometries():
    lat = build_sol_lattice(AnosovMatrix(2, 1, 1, 1))
    samples = default_samples()
    for gen in lat.generators:
        assert verify_isometry(gen, samples) <= 1e-12


def test_generator_products_are_isometries():
    lat = build_sol_lattice(AnosovMatrix(2, 1, 1, 1))
    samples = default_samples()
    for g1 in lat.generators:
        for g2 in lat.generators:
            assert verify_isometry(g1.compose(g2), samples) <= 1e-12


def test_identity_has_zero_deviation():
    ident = AffineMap3(np.eye(3), np.zeros(3))
    assert verify_isometry(ident, default_samples()) == 0.0


def test_plain_z_shift_is_not_an_isometry():
    shift = AffineMap3(np.eye(3), np.array([0.0, 0.0, 0.1]))
    assert verify_isometry(shift, [np.zeros(3)]) > 0.1


def test_verify_isometry_needs_samples():
    ident = AffineMap3(np.eye(3), np.zeros(3))
    with pytest.raises(ValueError):
        verify_isometry(ident, [])


def test_cross_section_volume_unit_cell():
    lat = SolLattice(
        matrix=AnosovMatrix(2, 1, 1, 1),
        stretch=1.0,
        basis=np.array([[1.0, 0.0], [0.0, 1.0]]),
    )
    assert cross_section_volume(lat) == 1.0


def test_cross_section_volume_scales_with_area():
    lat = SolLattice(
        matrix=AnosovMatrix(2, 1, 1, 1),
        stretch=0.5,
        basis=np.array([[2.0, 0.0], [0.0, 1.0]]),
    )
    assert cross_section_volume(lat) == pytest.approx(1.0, abs=1e-15)


def test_built_lattice_has_unit_area_cell():
    lat = build_sol_lattice(AnosovMatrix(2, 1, 1, 1))
    assert abs(np.linalg.det(lat.basis)) == pytest.approx(1.0, abs=1e-12)
    assert cross_section_volume(lat) == pytest.approx(L_211, abs=1e-12)


def test_lattice_basis_closed_under_monodromy():
    # diag(lam, 1/lam) maps the basis into integer combinations of itself
    lat = build_sol_lattice(AnosovMatrix(2, 1, 1, 1))
    lam = np.exp(lat.stretch)
    D = np.diag([lam, 1.0 / lam])
    B = lat.basis.T  # columns are the basis vectors
    coeffs = np.linalg.solve(B, D @ B)
    assert np.allclose(coeffs, np.round(coeffs), atol=1e-10)


@pytest.mark.parametrize("P", [
    np.array([[1, 1], [0, 1]]),
    np.array([[1, 0], [3, 1]]),
    np.array([[2, 1], [1, 1]]),
])
def test_stretch_is_conjugacy_invariant(P):
    A = np.array([[2, 1], [1, 1]])
    P_inv = np.round(np.linalg.inv(P)).astype(int)
    assert np.array_equal(P @ P_inv, np.eye(2, dtype=int))
    B = P @ A @ P_inv
    conj = AnosovMatrix(*B.flatten().tolist())
    assert abs(conj.stretch - AnosovMatrix(2, 1, 1, 1).stretch) <= 1e-12


def test_negative_trace_monodromy_is_still_isometric():
    lat = build_sol_lattice(AnosovMatrix(-2, -1, -1, -1))
    assert lat.stretch == pytest.approx(L_211, abs=1e-12)
    for gen in lat.generators:
        assert verify_isometry(gen, default_samples()) <= 1e-12


def test_affine_map_requires_invertible_linear_part():
    with pytest.raises(ValueError):
        AffineMap3(np.zeros((3, 3)), np.zeros(3))
