"""Rotation-eigenspace (sigma-sector) reduction of the eigenproblem at k = M.

A state at M is expanded as sum_m c(m) exp(i (M + 2 pi m).x). Rotating the
plane by a quarter turn permutes the exponents through the orbit map, and a
sigma-sector state satisfies c(orbit^j m) = sigma^(4-j) c(m).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .hamiltonian import NumericalError, PlaneWaveBasis, eigensolve, fix_phase
from .lattice_bz import DualIndex, OrbitTable, m_norm_sq, rotate_index_orbit
from .potential import FourierPotential

log = logging.getLogger(__name__)

SIGMAS: tuple[complex, ...] = (1, -1, 1j, -1j)
SIGMA_NAMES = {1: "+1", -1: "-1", 1j: "+i", -1j: "-i"}
SECTOR_ABORT = 1e-6


def sigma_name(sigma) -> str:
    return SIGMA_NAMES[complex(sigma)]


def parse_sigma(label) -> complex:
    if isinstance(label, str):
        for k, v in SIGMA_NAMES.items():
            if v == label.strip():
                return k
        raise ValueError(f"unknown sector label {label!r}")
    s = complex(label)
    if s not in SIGMA_NAMES:
        raise ValueError(f"sector label must be one of +1, -1, +i, -i, got {label!r}")
    return s


def _orbit_powers(r: DualIndex) -> list[DualIndex]:
    out = [r]
    for _ in range(3):
        out.append(rotate_index_orbit(out[-1]))
    return out


def kernel_K_sigma(V: FourierPotential, sigma, m: DualIndex, r: DualIndex) -> complex:
    """sum_j sigma^(4-j) V_{m - orbit^j r}."""
    total = 0j
    for j, rj in enumerate(_orbit_powers(r)):
        total += sigma ** (4 - j) * V.coefficient((m[0] - rj[0], m[1] - rj[1]))
    return complex(total)


@dataclass(frozen=True)
class SectorMatrix:
    sigma: complex
    entries: np.ndarray
    defect: float


def sector_matrix(V: FourierPotential, eps: float, sigma, table: OrbitTable) -> SectorMatrix:
    sigma = parse_sigma(sigma)
    S = np.array(table.representatives)
    K = np.zeros((len(S), len(S)), dtype=complex)
    for j in range(4):
        rj = S.copy()
        for _ in range(j):
            rj = np.stack([rj[:, 1], -1 - rj[:, 0]], axis=1)
        d = S[:, None, :] - rj[None, :, :]
        K += sigma ** (4 - j) * V.lookup(d[..., 0], d[..., 1])
    A = eps * K
    A[np.diag_indices_from(A)] += [m_norm_sq(tuple(r)) for r in S]
    scale = max(1.0, float(np.max(np.abs(A))))
    defect = float(np.max(np.abs(A - A.conj().T))) / scale
    if defect > SECTOR_ABORT:
        raise NumericalError(f"sector {sigma_name(sigma)} matrix not Hermitian "
                             f"(defect {defect:.3e}); potential is not admissible")
    if defect > 1e-10:
        log.warning("sector %s pre-symmetrization defect %.3e", sigma_name(sigma), defect)
    return SectorMatrix(sigma=sigma, entries=0.5 * (A + A.conj().T), defect=defect)


@dataclass
class SectorSpectrum:
    sigma: complex
    representatives: list[DualIndex]
    eigenvalues: np.ndarray
    coefficient_vectors: np.ndarray  # columns over S
    defect: float = 0.0

    def to_json(self) -> dict:
        return {
            "sigma": sigma_name(self.sigma),
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "defect": float(self.defect),
            "representative_count": len(self.representatives),
        }


def sector_spectrum(V: FourierPotential, eps: float, sigma, table: OrbitTable,
                    B: int | None = None) -> SectorSpectrum:
    sm = sector_matrix(V, eps, sigma, table)
    B = len(table.representatives) if B is None else B
    if B > len(table.representatives):
        raise ValueError("B exceeds the number of orbit representatives")
    w, U = eigensolve(sm.entries, B)
    return SectorSpectrum(sm.sigma, list(table.representatives), w, U, sm.defect)


def all_sector_spectra(V, eps, table, B=None) -> dict[complex, SectorSpectrum]:
    return {s: sector_spectrum(V, eps, s, table, B) for s in SIGMAS}


def synthesis_matrix(sigma, table: OrbitTable, basis: PlaneWaveBasis) -> np.ndarray:
    """Isometry T (dim x |S|) sending a sector vector to its full plane-wave vector."""
    sigma = parse_sigma(sigma)
    pos = basis.position()
    T = np.zeros((basis.dim, len(table.representatives)), dtype=complex)
    for i, r in enumerate(table.representatives):
        for j, rj in enumerate(_orbit_powers(r)):
            T[pos[rj], i] += 0.5 * sigma ** (4 - j)
    return T


def synthesize_eigenfunction(sigma, coefficients, table: OrbitTable,
                             basis: PlaneWaveBasis) -> np.ndarray:
    """Full plane-wave vector with c(orbit^j m) = sigma^(4-j) c(m) / 2, unit norm."""
    out = synthesis_matrix(sigma, table, basis) @ np.asarray(coefficients, dtype=complex)
    nrm = np.linalg.norm(out)
    return out / nrm if nrm > 0 else out


def rotation_permutation(basis: PlaneWaveBasis) -> np.ndarray:
    """perm with (R v)[perm[i]] = v[i], i.e. c_{Rv}(orbit(m)) = c_v(m)."""
    pos = basis.position()
    return np.array([pos[rotate_index_orbit((int(a), int(b)))] for a, b in basis.indices])


def apply_rotation(v: np.ndarray, basis: PlaneWaveBasis) -> np.ndarray:
    w = np.zeros_like(v)
    w[rotation_permutation(basis)] = v
    return w


def classify_state(v: np.ndarray, basis: PlaneWaveBasis, tol: float = 1e-8):
    w = apply_rotation(v, basis)
    hits = [s for s in SIGMAS if np.linalg.norm(w - s * v) <= tol]
    return hits[0] if len(hits) == 1 else "mixed"


def pc_conjugate(v: np.ndarray) -> np.ndarray:
    """Parity composed with complex conjugation acts as coefficientwise conjugation."""
    return np.conj(v)


def degenerate_pair(V: FourierPotential, eps: float, table: OrbitTable,
                    basis: PlaneWaveBasis, level: int = 0):
    """(mu_S, Phi1, Phi2): Phi1 from the +i sector, Phi2 its PC image."""
    sp = sector_spectrum(V, eps, 1j, table, level + 1)
    phi1 = fix_phase(synthesize_eigenfunction(1j, sp.coefficient_vectors[:, level], table, basis))
    return float(sp.eigenvalues[level]), phi1, pc_conjugate(phi1)
