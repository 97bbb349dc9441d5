"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (also collected into the terminal
summary) and then asserts. Tolerances are pinned as module constants.
"""

import time

import numpy as np
import pytest

from bandlab.hamiltonian import (assemble, band_structure, cluster_values, default_cluster_tol,
                                 eigensolve, make_basis, potential_matrix)
from bandlab.lattice_bz import M_POINT, build_orbit_table, standard_path
from bandlab.normal_form import fit_from_potential, resolvent_coefficients, symmetry_check_near_M
from bandlab.perturbation import (ORDER_SEQUENCES, deformation_splitting, first_order,
                                  leading_coefficients, ordering_case)
from bandlab.potential import from_coefficients, from_cosine_modes, zero_potential
from bandlab.cli import FIGURES, build_potential, observed_ordering
from bandlab.sectors import SIGMAS, all_sector_spectra, degenerate_pair, sector_spectrum
from bandlab.tight_binding import lieb_gaussian, tb_bands, tb_matrix

TWO_PI_SQ = 2 * np.pi**2

TOL_FREE = 1e-10
RATIO_TARGET, RATIO_SLACK = 4.0, 0.5
TOL_PAIR = 1e-9
MIN_SEPARATION = 1e-3
TOL_FIT_REL = 0.02
TOL_LEADING_REL = 0.10
TOL_GAMMA_RES = 1e-8
TOL_GAMMA_FIT = 1e-6
TOL_STRUCT = 1e-8
TOL_NEAR_M = 1e-8
TOL_TB = 1e-12
DEFORM_WINDOW = (3.5, 4.5)
VISUAL_TOUCH = 1e-3


def base_V():
    return from_cosine_modes([((0, 1), 0.2), ((1, 1), -0.5)])


def vertex_potential(V11, V01):
    return from_cosine_modes([((0, 1), V01), ((1, 1), V11)])


def test_criterion_01_free_degeneracy(record_criterion):
    t0 = time.perf_counter()
    N = 6
    basis = make_basis(N)
    w, _ = eigensolve(assemble(zero_potential(), 0.0, M_POINT, basis), 5, vectors=False)
    table = build_orbit_table(N)
    per_sector = [int(np.sum(np.abs(sector_spectrum(zero_potential(), 0.0, s, table, 2).eigenvalues
                                    - TWO_PI_SQ) <= TOL_FREE)) for s in SIGMAS]
    dt = time.perf_counter() - t0
    four = float(np.max(np.abs(w[:4] - TWO_PI_SQ)))
    fifth_target = TWO_PI_SQ + 4 * np.pi**2
    fifth = abs(w[4] - fifth_target)
    ok = four <= TOL_FREE and fifth <= TOL_FREE and per_sector == [1, 1, 1, 1] and dt < 1.0
    record_criterion(1, ok, f"lowest-four dev {four:.1e}; fifth {w[4]:.10f} vs 2pi^2+4pi^2={fifth_target:.10f} "
                            f"(dev {fifth:.2e}); per-sector {per_sector}; {dt:.2f}s")
    assert ok


def test_criterion_02_first_order_scaling(record_criterion):
    t0 = time.perf_counter()
    V = base_V()
    N = 10
    table, basis = build_orbit_table(N), make_basis(N)
    res, oracle_dev = [], 0.0
    for eps in (1e-2, 5e-3, 2.5e-3):
        spectra = all_sector_spectra(V, eps, table, 1)
        pred = first_order(V, eps)
        got = np.array([spectra[1j].eigenvalues[0], spectra[1].eigenvalues[0], spectra[-1].eigenvalues[0]])
        res.append(np.abs(got - np.array([pred.mu_S, pred.mu_plus1, pred.mu_minus1])))
        dense, _ = eigensolve(assemble(V, eps, M_POINT, basis), 4, vectors=False)
        sec = np.sort(np.concatenate([spectra[s].eigenvalues for s in SIGMAS]))
        oracle_dev = max(oracle_dev, float(np.max(np.abs(dense - sec))))
    res = np.array(res)
    ratios = res[:-1] / res[1:]
    dt = time.perf_counter() - t0
    ok = bool(np.all(np.abs(ratios - RATIO_TARGET) <= RATIO_SLACK)) and oracle_dev <= 1e-10 and dt < 10
    record_criterion(2, ok, f"halving ratios (S,+1,-1) {np.round(ratios, 3).tolist()}; "
                            f"sector vs dense {oracle_dev:.1e}; {dt:.2f}s")
    assert ok


def test_criterion_03_exact_double(record_criterion):
    spectra = all_sector_spectra(base_V(), 1.0, build_orbit_table(12), 1)
    mu = {s: spectra[s].eigenvalues[0] for s in SIGMAS}
    pair = abs(mu[1j] - mu[-1j])
    sep = min(abs(mu[1j] - mu[1]), abs(mu[1j] - mu[-1]))
    ok = pair <= TOL_PAIR and sep > MIN_SEPARATION
    record_criterion(3, ok, f"|mu_+i - mu_-i| = {pair:.1e}; separation from +-1 = {sep:.4f}")
    assert ok


ROWS = {"1a": (0.5, -0.2), "1b": (0.5, 0.2), "2a": (-0.2, -0.5),
        "2b": (-0.2, 0.5), "3a": (-0.5, -0.2), "3b": (-0.5, 0.2)}


def test_criterion_04_ordering_table(record_criterion):
    table = build_orbit_table(10)
    bad = []
    for row, (V11, V01) in ROWS.items():
        V = vertex_potential(V11, V01)
        obs = observed_ordering(all_sector_spectra(V, 1e-2, table, 1))
        if ordering_case(V).label != row or tuple(obs["sequence"]) != ORDER_SEQUENCES[row]:
            bad.append(row)
    ok = not bad
    record_criterion(4, ok, f"rows reproduced {6 - len(bad)}/6" + (f", mismatched {bad}" if bad else ""))
    assert ok


def test_criterion_05_normal_form_cross_validation(record_criterion):
    t0 = time.perf_counter()
    N = 12
    basis = make_basis(N)
    # eps V of order one keeps the radius-1e-2 stencil inside the quadratic regime
    V = from_cosine_modes([((0, 1), 2.0), ((1, 1), -5.0)])
    _, nf = resolvent_coefficients(V, 0.1, basis)
    fit = fit_from_potential(V, 0.1, 1e-2, basis, mu_S=nf.mu_S)
    rel = [abs(fit.alpha - nf.alpha) / abs(nf.alpha),
           abs(abs(fit.beta) - abs(nf.beta)) / abs(nf.beta),
           abs(abs(fit.gamma) - abs(nf.gamma)) / abs(nf.gamma)]
    fit_ok = max(rel) <= TOL_FIT_REL

    V2 = base_V()
    _, nf2 = resolvent_coefficients(V2, 1e-2, basis)
    closed = leading_coefficients(V2, 1e-2)[0] * 1e-2
    lead_rel = abs(1e-2 * nf2.alpha - closed) / abs(closed)
    lead_ok = lead_rel <= TOL_LEADING_REL
    dt = time.perf_counter() - t0
    ok = fit_ok and lead_ok and dt < 60
    record_criterion(5, ok, f"fit vs resolvent rel (alpha,|beta|,|gamma|) {np.round(rel, 4).tolist()}; "
                            f"eps*alpha={1e-2 * nf2.alpha:.4f} vs 32pi^2 V11/(V11^2-V01^2)={closed:.4f} "
                            f"(rel {lead_rel:.3f}); {dt:.1f}s")
    assert ok


def test_criterion_06_reflection_gamma(record_criterion):
    V = from_cosine_modes([((1, 1), -0.5)])
    basis = make_basis(12)
    _, nf = resolvent_coefficients(V, 1.0, basis)
    fit = fit_from_potential(V, 1.0, 1e-2, basis, mu_S=nf.mu_S)
    r_ok = abs(nf.gamma) <= TOL_GAMMA_RES * (1 + abs(nf.beta))
    f_ok = abs(fit.gamma) ** 2 <= TOL_GAMMA_FIT * abs(fit.beta) ** 2
    ok = r_ok and f_ok
    record_criterion(6, ok, f"resolvent |gamma|={abs(nf.gamma):.1e} (|beta|={abs(nf.beta):.3f}); "
                            f"fit |gamma|^2/|beta|^2={abs(fit.gamma) ** 2 / abs(fit.beta) ** 2:.1e}")
    assert ok


def test_criterion_07_a_structure(record_criterion):
    worst = {}
    for eps in (1e-2, 1.0):
        A, nf = resolvent_coefficients(base_V(), eps, make_basis(12))
        for k in ("hermiticity", "transpose", "rotation"):
            worst[k] = max(worst.get(k, 0.0), nf.structure_defects[k])
    ok = max(worst.values()) <= TOL_STRUCT
    record_criterion(7, ok, "max defects " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert ok


def test_criterion_08_near_m_symmetry(record_criterion):
    rng = np.random.default_rng(8)
    r = 0.05 * np.sqrt(rng.random(20))
    th = 2 * np.pi * rng.random(20)
    kap = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    refl = symmetry_check_near_M(base_V(), 1.0, kap, N=10)
    twisted = from_cosine_modes([((1, 2), -0.5), ((0, 1), 0.3)])
    rot = symmetry_check_near_M(twisted, 1.0, kap, N=10)
    ok = refl["passed"] and rot["passed"] and rot["reflection_max"] is None
    record_criterion(8, ok, f"rotation {refl['rotation_max']:.1e} / reflection {refl['reflection_max']:.1e} "
                            f"(reflection-invariant V); rotation {rot['rotation_max']:.1e} (chiral V)")
    assert ok


def test_criterion_09_tight_binding(record_criterion):
    rng = np.random.default_rng(9)
    ks = rng.uniform(-np.pi, np.pi, size=(1000, 2))
    dev, zero_exact = 0.0, True
    for k in ks:
        b = tb_bands(k)
        zero_exact &= b.E_zero == 0.0
        dev = max(dev, float(np.max(np.abs(np.linalg.eigvalsh(tb_matrix(k)) - [b.E_minus, 0.0, b.E_plus]))))
    hs = {name: tb_bands(k) for name, k in (("G", (0, 0)), ("X", (np.pi, 0)), ("M", (np.pi, np.pi)))}
    hs_ok = (abs(hs["G"].E_plus - 2 * np.sqrt(2)) <= TOL_TB and abs(hs["G"].E_minus + 2 * np.sqrt(2)) <= TOL_TB
             and abs(hs["X"].E_plus - np.sqrt(2)) <= TOL_TB and abs(hs["X"].E_minus + np.sqrt(2)) <= TOL_TB
             and max(abs(hs["M"].E_plus), abs(hs["M"].E_minus)) <= TOL_TB)
    ok = zero_exact and dev <= TOL_TB and hs_ok
    record_criterion(9, ok, f"E_zero exact {zero_exact}; closed vs numeric {dev:.1e}; E_+ at Gamma/X/M = "
                            f"{hs['G'].E_plus:.6f}/{hs['X'].E_plus:.6f}/{hs['M'].E_plus:.1e} "
                            f"vs 2sqrt2/sqrt2/0: {hs_ok}")
    assert ok


def test_criterion_10_lieb_non_persistence(record_criterion):
    t0 = time.perf_counter()
    N = 14
    V = lieb_gaussian(1000.0, 1e-3, 2 * N + 1)
    basis, table = make_basis(N), build_orbit_table(N)
    mu_S = degenerate_pair(V, 1.0, table, basis)[0]
    tol = default_cluster_tol(mu_S)
    low = np.sort(np.concatenate([sector_spectrum(V, 1.0, s, table, 3).eigenvalues for s in SIGMAS]))[:3]
    clusters = cluster_values(low)
    pair = [m for v, m in clusters if abs(v - mu_S) <= tol]
    third = min(abs(v - mu_S) for v, m in clusters if abs(v - mu_S) > tol)
    vmat = potential_matrix(V, basis)
    B = int(np.searchsorted(low, mu_S + tol)) + 1
    d = np.array([1.0, 1.0]) / np.sqrt(2)
    ratios = []
    for kap in (1e-2, 5e-3, 2.5e-3):
        w, _ = eigensolve(assemble(V, 1.0, M_POINT + kap * d, basis, vmat), B + 1, vectors=False)
        two = np.sort(w[np.argsort(np.abs(w - mu_S))[:2]])
        ratios.append((two[1] - two[0]) / kap)
    dt = time.perf_counter() - t0
    ok = pair == [2] and third > 10 * tol and ratios[0] > ratios[1] > ratios[2] and dt < 300
    record_criterion(10, ok, f"pair size {pair}, third band at {third:.4f} (10*tol={10 * tol:.1e}); "
                             f"gap/|kappa| {np.round(ratios, 4).tolist()}; {dt:.1f}s")
    assert ok


def _deformed_gap(V, eps, W, eta, basis, mu_S):
    total = V.scaled(eps) + W.scaled(eta)
    w, _ = eigensolve(assemble(total, 1.0, M_POINT, basis), vectors=False)
    two = np.sort(w[np.argsort(np.abs(w - mu_S))[:2]])
    return float(two[1] - two[0])


def test_criterion_11_deformation(record_criterion):
    N, eps, eta = 12, 1e-2, 1e-3
    basis, table = make_basis(N), build_orbit_table(N)
    V = base_V()
    mu_S, phi1, phi2 = degenerate_pair(V, eps, table, basis)
    W0 = from_coefficients({(1, 1): 1.0, (-1, -1): 1.0}, 1)
    gap = _deformed_gap(V, eps, W0, eta, basis, mu_S)
    nu_p, nu_m, _, off = deformation_splitting(phi1, phi2, W0, eta, basis.indices, mu_S)
    lo, hi = DEFORM_WINDOW
    w0_ok = lo <= gap / eta <= hi
    Wadm = from_cosine_modes([((1, 0), 1.0), ((1, 1), 0.7)])
    gap_adm = _deformed_gap(V, eps, Wadm, eta, basis, mu_S)
    adm_ok = gap_adm <= 10 * default_cluster_tol(mu_S)
    ok = w0_ok and adm_ok
    record_criterion(11, ok, f"W0 gap/eta = {gap / eta:.5f} (window {DEFORM_WINDOW}; first-order "
                             f"2|<Phi1,W0 Phi2>| = {2 * off:.5f}); admissible-W gap {gap_adm:.1e} "
                             f"(<= {10 * default_cluster_tol(mu_S):.1e}: {adm_ok})")
    assert ok


# expected per figure configuration: (ordering row, bands touching at M)
FIGURE_EXPECTATIONS = {"fig11": ("1b", [1, 2]), "fig8": ("3a", [3, 4]), "fig12": ("2a", [2, 3]),
            "fig9": ("2b", [2, 3]), "fig10": ("2a", [2, 3])}


def test_criterion_12_figures(record_criterion):
    N = 10
    table = build_orbit_table(N)
    notes, ok = [], True
    for name, (row, bands) in FIGURE_EXPECTATIONS.items():
        cfg = FIGURES[name]
        V = build_potential(cfg["potential"], N)
        obs = observed_ordering(all_sector_spectra(V, cfg["epsilon"], table, 3))
        good = obs["touching_bands"] == bands and (row is None or tuple(obs["sequence"]) == ORDER_SEQUENCES[row])
        if name == "fig12":
            # the pair stays visually together along M -> Gamma: gap below plot resolution,
            # taken as 1e-3 of the five-band energy range (the converged gap is ~1e-3, not zero)
            bs = band_structure(V, cfg["epsilon"], standard_path(11), 5, N)
            seg = slice(2 * 10, None)
            mg = float(np.max(bs.bands[seg, 2] - bs.bands[seg, 1]))
            good &= mg <= VISUAL_TOUCH * float(np.ptp(bs.bands))
            notes.append(f"fig12 M-Gamma max gap {mg:.1e}")
        ok &= good
        notes.append(f"{name}:{'ok' if good else 'MISMATCH'}({'<'.join(obs['sequence'])},bands {obs['touching_bands']})")
    record_criterion(12, ok, "; ".join(notes))
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
