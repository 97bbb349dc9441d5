"""Plane-wave Bloch Hamiltonians H(k) = |k + 2 pi m|^2 delta_mn + eps V_{m-n}."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .lattice_bz import KPath, box_indices
from .potential import FourierPotential

HERMITIAN_TOL = 1e-12


class NumericalError(RuntimeError):
    """Raised when a numerical invariant is broken (exit code 2 in the CLI)."""


@dataclass(frozen=True)
class PlaneWaveBasis:
    N: int
    indices: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.indices)

    def position(self) -> dict[tuple[int, int], int]:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.indices)}


def make_basis(N: int) -> PlaneWaveBasis:
    return PlaneWaveBasis(N=N, indices=box_indices(N))


@dataclass(frozen=True)
class BlochMatrix:
    k: np.ndarray
    entries: np.ndarray
    basis: PlaneWaveBasis


def potential_matrix(V: FourierPotential, basis: PlaneWaveBasis) -> np.ndarray:
    """Toeplitz block V_{m-n} over the basis (k independent)."""
    d = basis.indices[:, None, :] - basis.indices[None, :, :]
    return V.lookup(d[..., 0], d[..., 1])


def kinetic_diagonal(k, basis: PlaneWaveBasis) -> np.ndarray:
    q = np.asarray(k, dtype=float)[None, :] + 2.0 * np.pi * basis.indices
    return np.sum(q * q, axis=1)


def assemble(V: FourierPotential, eps: float, k, basis: PlaneWaveBasis,
             vmat: np.ndarray | None = None) -> BlochMatrix:
    if vmat is None:
        vmat = potential_matrix(V, basis)
    H = eps * vmat
    H[np.diag_indices_from(H)] += kinetic_diagonal(k, basis)
    return BlochMatrix(k=np.asarray(k, dtype=float), entries=H, basis=basis)


def hermiticity_defect(H: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(H))))
    return float(np.max(np.abs(H - H.conj().T))) / scale


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate v so its largest-magnitude entry is real positive.

    Near-ties (within 1e-9 relative) go to the lowest index, which keeps the
    choice stable for symmetric states whose orbit entries share a modulus.
    """
    mags = np.abs(v)
    i = int(np.argmax(mags >= mags.max() * (1.0 - 1e-9)))
    if mags[i] == 0.0:
        return v
    return v * (np.conj(v[i]) / mags[i])


def eigensolve(H: BlochMatrix | np.ndarray, num_bands: int | None = None,
               vectors: bool = True):
    """Lowest eigenpairs of a Hermitian matrix, ascending, phases fixed."""
    A = H.entries if isinstance(H, BlochMatrix) else H
    n = A.shape[0]
    B = n if num_bands is None else num_bands
    if B > n:
        raise ValueError(f"requested {B} bands but dim is {n}")
    defect = hermiticity_defect(A)
    if defect > HERMITIAN_TOL:
        raise NumericalError(f"matrix is not Hermitian (relative defect {defect:.3e})")
    if not vectors:
        return scipy.linalg.eigh(A, eigvals_only=True, subset_by_index=[0, B - 1]), None
    w, U = scipy.linalg.eigh(A, subset_by_index=[0, B - 1])
    for j in range(U.shape[1]):
        U[:, j] = fix_phase(U[:, j])
    return w, U


@dataclass
class BandStructure:
    k: np.ndarray  # (n_samples, 2)
    s: np.ndarray  # arclength or row-major grid index
    bands: np.ndarray  # (n_samples, B)
    path: KPath | None = None
    grid_shape: tuple[int, int] | None = None
    eigenvectors: list | None = None


def _scan(V, eps, ks, B, basis, threads):
    vmat = potential_matrix(V, basis)

    def one(k):
        return eigensolve(assemble(V, eps, k, basis, vmat), B, vectors=False)[0]

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(one, ks))
    else:
        rows = [one(k) for k in ks]
    return np.array(rows)


def band_structure(V: FourierPotential, eps: float, path: KPath, B: int, N: int = 12,
                   threads: int = 1) -> BandStructure:
    basis = make_basis(N)
    bands = _scan(V, eps, list(path.points), B, basis, threads)
    return BandStructure(k=path.points.copy(), s=path.arclength.copy(), bands=bands, path=path)


def grid_points(n_k: int) -> np.ndarray:
    """Uniform (n_k+1)^2 grid over [-pi, pi]^2, row-major in (k1, k2)."""
    if n_k < 2:
        raise ValueError("n_k must be >= 2")
    g = np.linspace(-np.pi, np.pi, n_k + 1)
    K1, K2 = np.meshgrid(g, g, indexing="ij")
    return np.stack([K1.ravel(), K2.ravel()], axis=1)


def surfaces_on_grid(V: FourierPotential, eps: float, n_k: int, B: int, N: int = 12,
                     threads: int = 1) -> BandStructure:
    ks = grid_points(n_k)
    bands = _scan(V, eps, list(ks), B, make_basis(N), threads)
    return BandStructure(k=ks, s=np.arange(len(ks), dtype=float), bands=bands,
                         grid_shape=(n_k + 1, n_k + 1))


def default_cluster_tol(mu: float) -> float:
    return 1e-7 * (1.0 + abs(mu))


def cluster_values(values, cluster_tol: float | None = None) -> list[tuple[float, int]]:
    """Group sorted values whose consecutive gaps are below the tolerance."""
    vals = np.sort(np.asarray(values, dtype=float))
    if len(vals) == 0:
        return []
    groups = [[vals[0]]]
    for a, b in zip(vals[:-1], vals[1:]):
        tol = default_cluster_tol(a) if cluster_tol is None else cluster_tol
        if b - a < tol:
            groups[-1].append(b)
        else:
            groups.append([b])
    return [(float(np.mean(g)), len(g)) for g in groups]


def detect_degeneracy(H: BlochMatrix, B: int, cluster_tol: float | None = None):
    w, _ = eigensolve(H, B, vectors=False)
    return cluster_values(w, cluster_tol)
