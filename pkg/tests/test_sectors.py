import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bandlab.hamiltonian import NumericalError, assemble, eigensolve, make_basis
from bandlab.lattice_bz import M_POINT, build_orbit_table
from bandlab.potential import from_coefficients, from_cosine_modes
from bandlab.sectors import (SIGMAS, all_sector_spectra, apply_rotation, classify_state,
                             degenerate_pair, kernel_K_sigma, parse_sigma, pc_conjugate,
                             sector_matrix, sector_spectrum, sigma_name, synthesis_matrix,
                             synthesize_eigenfunction)

N = 4
TABLE = build_orbit_table(N)
BASIS = make_basis(N)

modes_st = st.lists(
    st.tuples(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.floats(-1, 1, allow_nan=False)),
    min_size=1, max_size=3)


@settings(max_examples=15, deadline=None)
@given(modes_st, st.floats(0.0, 5.0))
def test_sector_union_equals_dense_spectrum(modes, eps):
    V = from_cosine_modes(modes)
    spectra = all_sector_spectra(V, eps, TABLE)
    union = np.sort(np.concatenate([spectra[s].eigenvalues for s in SIGMAS]))
    dense, _ = eigensolve(assemble(V, eps, M_POINT, BASIS), vectors=False)
    assert np.allclose(union, dense, atol=1e-9 * (1 + np.max(np.abs(dense))))


def test_synthesis_matrices_form_a_unitary():
    T = np.hstack([synthesis_matrix(s, TABLE, BASIS) for s in SIGMAS])
    assert T.shape == (BASIS.dim, BASIS.dim)
    assert np.allclose(T.conj().T @ T, np.eye(BASIS.dim), atol=1e-14)


def test_synthesized_states_are_rotation_eigenvectors():
    V = from_cosine_modes([((0, 1), 0.2), ((1, 1), -0.5)])
    H = assemble(V, 1.0, M_POINT, BASIS).entries
    for s in SIGMAS:
        sp = sector_spectrum(V, 1.0, s, TABLE, 2)
        phi = synthesize_eigenfunction(s, sp.coefficient_vectors[:, 0], TABLE, BASIS)
        assert np.isclose(np.linalg.norm(phi), 1.0)
        assert np.linalg.norm(H @ phi - sp.eigenvalues[0] * phi) < 1e-9
        assert classify_state(phi, BASIS) == s
        assert np.allclose(apply_rotation(phi, BASIS), s * phi)


def test_pc_maps_plus_i_to_minus_i():
    V = from_cosine_modes([((0, 1), 0.2), ((1, 1), -0.5)])
    mu, phi1, phi2 = degenerate_pair(V, 1.0, TABLE, BASIS)
    H = assemble(V, 1.0, M_POINT, BASIS).entries
    assert classify_state(phi1, BASIS) == 1j and classify_state(phi2, BASIS) == -1j
    assert np.linalg.norm(H @ phi2 - mu * phi2) < 1e-9
    assert abs(np.vdot(phi1, phi2)) < 1e-12
    assert np.allclose(pc_conjugate(phi1), phi2)
    mixed = (phi1 + phi2) / np.sqrt(2)
    assert classify_state(mixed, BASIS) == "mixed"


def test_kernel_matches_sector_matrix():
    V = from_cosine_modes([((0, 1), 0.2), ((1, 1), -0.5), ((1, 2), 0.1)])
    eps = 0.7
    for s in SIGMAS:
        A = sector_matrix(V, eps, s, TABLE).entries
        for i, j in ((0, 1), (2, 5), (3, 3)):
            m, r = TABLE.representatives[i], TABLE.representatives[j]
            diag = (2 * np.pi**2 + 4 * np.pi**2 * (m[0] ** 2 + m[1] ** 2 + m[0] + m[1])) if i == j else 0.0
            assert np.isclose(A[i, j], diag + eps * kernel_K_sigma(V, s, m, r))


def test_non_rotation_invariant_potential_aborts():
    V = from_coefficients({(1, 0): 1.0, (-1, 0): 1.0, (2, 1): 0.5, (-2, -1): 0.5}, 2)
    with pytest.raises(NumericalError):
        sector_matrix(V, 1.0, 1, TABLE)


def test_labels():
    for s in SIGMAS:
        assert parse_sigma(sigma_name(s)) == s
    assert parse_sigma(-1) == -1
    with pytest.raises(ValueError):
        parse_sigma(2)
    sp = sector_spectrum(from_cosine_modes([((1, 1), 0.3)]), 1.0, "+i", TABLE, 3)
    js = sp.to_json()
    assert js["sigma"] == "+i" and len(js["eigenvalues"]) == 3 and js["representative_count"] == (N + 1) ** 2
