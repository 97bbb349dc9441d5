"""Nearest-neighbour three-band Lieb model and its contrast with the continuum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import (assemble, cluster_values, default_cluster_tol, eigensolve,
                          make_basis, potential_matrix)
from .lattice_bz import GAMMA, M_POINT, X_POINT, KPath, build_orbit_table
from .normal_form import fit_from_potential
from .potential import FourierPotential, from_gaussian_lattice
from .sectors import SIGMAS, degenerate_pair, sector_spectrum

LIEB_SITES = ((0.0, 0.0), (0.5, 0.0), (0.0, 0.5))


@dataclass(frozen=True)
class TBBands:
    k: np.ndarray
    E_minus: float
    E_zero: float
    E_plus: float


def tb_matrix(k) -> np.ndarray:
    k1, k2 = float(k[0]), float(k[1])
    a = 1.0 + np.exp(1j * k2)
    c = 1.0 + np.exp(1j * k1)
    return np.array([[0.0, a, 0.0],
                     [np.conj(a), 0.0, np.conj(c)],
                     [0.0, c, 0.0]], dtype=complex)


def tb_bands(k) -> TBBands:
    k = np.asarray(k, dtype=float)
    e = np.sqrt(max(4.0 + 2.0 * np.cos(k[0]) + 2.0 * np.cos(k[1]), 0.0))
    return TBBands(k=k, E_minus=-e, E_zero=0.0, E_plus=e)


def tb_band_structure(path: KPath) -> list[TBBands]:
    return [tb_bands(k) for k in path.points]


def lieb_gaussian(V0: float, sigma: float = 1e-3, N_V: int = 29) -> FourierPotential:
    return from_gaussian_lattice(LIEB_SITES, (-1, -1, -1), V0, sigma, N_V)


def tb_contrast_report(V0_list, sigma: float = 1e-3, N: int = 14, kappa_disc: float = 0.05,
                       fit: bool = True) -> list[dict]:
    """Continuum Lieb-well bands versus the flat-band-plus-cone picture.

    For each depth: the M-point clusters among the lowest three bands, the gap
    from the touching pair to the third band, fitted |beta|, |gamma| of the pair,
    the spread of the third band over a kappa-disc around M, and the spread of
    the lowest three bands at M relative to their width over Gamma, X, M.
    """
    basis = make_basis(N)
    table = build_orbit_table(N)
    out = []
    for V0 in V0_list:
        V = lieb_gaussian(V0, sigma, 2 * N + 1)
        vmat = potential_matrix(V, basis)
        w = np.sort(np.concatenate([sector_spectrum(V, 1.0, s, table, 3).eigenvalues
                                    for s in SIGMAS]))[:3]
        clusters = cluster_values(w)
        mu_S = degenerate_pair(V, 1.0, table, basis)[0]
        tol = default_cluster_tol(mu_S)
        others = [i for i, x in enumerate(w) if abs(x - mu_S) > tol]
        third_idx = min(others, key=lambda i: abs(w[i] - mu_S)) if others else None
        gap_third = float(abs(w[third_idx] - mu_S)) if others else 0.0

        beta_abs = gamma_abs = fit_res = None
        if fit and gap_third > 0:
            try:
                # stay well inside the quadratic window set by the nearby third band
                nf = fit_from_potential(V, 1.0, min(1e-2, 0.02 * gap_third), basis, mu_S=mu_S)
                beta_abs, gamma_abs, fit_res = abs(nf.beta), abs(nf.gamma), nf.fit_residual
            except RuntimeError:
                pass

        flat = None
        if third_idx is not None:
            th = 2 * np.pi * np.arange(8) / 8
            vals = [eigensolve(assemble(V, 1.0, M_POINT + kappa_disc * np.array([np.cos(t), np.sin(t)]),
                                        basis, vmat), 3, vectors=False)[0][third_idx] for t in th]
            flat = float(np.ptp(vals))
        low3 = [eigensolve(assemble(V, 1.0, k, basis, vmat), 3, vectors=False)[0]
                for k in (GAMMA, X_POINT)] + [w]
        width = float(np.max(low3) - np.min(low3))
        spread = float(w.max() - w.min())
        out.append({
            "V0": float(V0),
            "sigma": float(sigma),
            "N": N,
            "clusters_at_M": [[float(v), int(m)] for v, m in clusters],
            "pair_size": int(sum(m for v, m in clusters if abs(v - mu_S) <= tol)),
            "mu_S": float(mu_S),
            "gap_pair_to_third": gap_third,
            "fit_beta_abs": beta_abs,
            "fit_gamma_abs": gamma_abs,
            "fit_residual": fit_res,
            "third_band_flatness": flat,
            "spread_at_M": spread,
            "three_band_width": width,
            "rescaled_spread": spread / width if width > 0 else None,
        })
    return out
