"""Local normal form of the two surfaces touching at M.

Near M + kappa the pair behaves like
    mu_pm - mu_S = (1 - alpha)|kappa|^2 +- |gamma (k1^2 - k2^2) + 2 beta k1 k2|,
with alpha = 4 a^{11}_{11}, beta = 4 a^{12}_{12}, gamma = 4 a^{12}_{11} and
a^{j1 j2}_{lm} = <d_l Phi_j1, (H - mu_S)^{-1} restricted off the pair, d_m Phi_j2>.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import (NumericalError, PlaneWaveBasis, assemble, default_cluster_tol,
                          eigensolve, make_basis, potential_matrix)
from .lattice_bz import M_POINT, R_MATRIX, RHO_MATRIX, build_orbit_table
from .potential import FourierPotential, validate_admissible
from .sectors import SIGMAS, degenerate_pair, sector_spectrum, synthesis_matrix


@dataclass(frozen=True)
class AMatrices:
    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    A22: np.ndarray

    def block(self, p: int, q: int) -> np.ndarray:
        return {(1, 1): self.A11, (1, 2): self.A12, (2, 1): self.A21, (2, 2): self.A22}[(p, q)]


@dataclass
class NormalFormCoefficients:
    mu_S: float
    alpha: float
    beta: complex
    gamma: complex
    source: str
    fit_residual: float | None = None
    re_gamma_conj_beta: float | None = None
    structure_defects: dict = field(default_factory=dict)
    near_contributions: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "mu_S": self.mu_S,
            "alpha": self.alpha,
            "beta": [self.beta.real, self.beta.imag],
            "gamma": [self.gamma.real, self.gamma.imag],
            "source": self.source,
            "fit_residual": self.fit_residual,
            "structure_defects": self.structure_defects,
        }


def gradient_coefficients(v: np.ndarray, basis: PlaneWaveBasis, k=M_POINT):
    """(d1 v, d2 v) for v = sum c(m) exp(i (k + 2 pi m).x)."""
    q = np.asarray(k, float)[None, :] + 2.0 * np.pi * basis.indices
    return 1j * q[:, 0] * v, 1j * q[:, 1] * v


def structure_defects(A: AMatrices) -> dict:
    R = R_MATRIX
    return {
        "hermiticity": float(max(np.max(np.abs(A.A11 - A.A11.conj().T)),
                                 np.max(np.abs(A.A22 - A.A22.conj().T)),
                                 np.max(np.abs(A.A21 - A.A12.conj().T)))),
        "transpose": float(np.max(np.abs(A.A11 - A.A22.T))),
        "rotation": float(max(np.max(np.abs(R.T @ A.A11 @ R - A.A11)),
                              np.max(np.abs(R.T @ A.A12 @ R + A.A12)))),
    }


def _sector_eigenbasis(V, eps, table, basis):
    """All eigenpairs of H(M), assembled sector by sector (exactly symmetric states)."""
    ws, Us = [], []
    for sigma in SIGMAS:
        sp = sector_spectrum(V, eps, sigma, table)
        ws.append(sp.eigenvalues)
        Us.append(synthesis_matrix(sigma, table, basis) @ sp.coefficient_vectors)
    return np.concatenate(ws), np.hstack(Us)


def resolvent_coefficients(V: FourierPotential, eps: float, basis: PlaneWaveBasis | None = None,
                           B_sum: int | None = None, cluster_tol: float | None = None,
                           N: int = 12, level: int = 0, method: str = "sectors"):
    """Spectral-sum evaluation of the A matrices and (alpha, beta, gamma) at M.

    method="sectors" takes the eigenpairs of H(M) from the four sector problems,
    so every state carries its exact rotation phase pattern; "dense" takes them
    from one full diagonalization. Both sum over the same spectrum.
    """
    basis = make_basis(N) if basis is None else basis
    table = build_orbit_table(basis.N)
    mu_S, phi1, phi2 = degenerate_pair(V, eps, table, basis, level)
    tol = default_cluster_tol(mu_S) if cluster_tol is None else cluster_tol
    if method == "sectors":
        w, U = _sector_eigenbasis(V, eps, table, basis)
        if B_sum is not None:
            keep = np.argsort(w, kind="stable")[:B_sum]
            w, U = w[keep], U[:, keep]
    elif method == "dense":
        w, U = eigensolve(assemble(V, eps, M_POINT, basis), B_sum)
    else:
        raise ValueError(f"unknown method {method!r}")
    in_pair = np.abs(w - mu_S) <= tol
    if int(in_pair.sum()) != 2:
        raise NumericalError(f"cluster at mu_S={mu_S:.12g} has size {int(in_pair.sum())}, expected 2")
    far = ~in_pair
    inv = 1.0 / (w[far] - mu_S)
    Ub = U[:, far]
    grads = {j: [Ub.conj().T @ g for g in gradient_coefficients(phi, basis)]
             for j, phi in ((1, phi1), (2, phi2))}

    def a(j1, j2, l, m):
        return complex(np.sum(np.conj(grads[j1][l]) * grads[j2][m] * inv))

    blocks = {}
    for j1 in (1, 2):
        for j2 in (1, 2):
            blocks[(j1, j2)] = np.array([[a(j1, j2, l, m) for m in (0, 1)] for l in (0, 1)])
    A = AMatrices(blocks[(1, 1)], blocks[(1, 2)], blocks[(2, 1)], blocks[(2, 2)])

    # contribution of the two states nearest mu_S (the +-1 vertex states at small eps)
    near = np.argsort(np.abs(w[far] - mu_S))[:2]
    near_alpha = 4 * float(np.sum(np.abs(grads[1][0][near]) ** 2 * inv[near]))

    alpha, beta, gamma = float((4 * A.A11[0, 0]).real), complex(4 * A.A12[0, 1]), complex(4 * A.A12[0, 0])
    defects = structure_defects(A)
    defects["alpha_imag"] = float(abs(A.A11[0, 0].imag))
    # reflection symmetry forces Re(gamma conj(beta)) = 0
    if validate_admissible(V).is_reflection_invariant:
        defects["reflection"] = float(abs((gamma * np.conj(beta)).real) / (1 + abs(gamma) * abs(beta)))
    else:
        defects["reflection"] = None
    nf = NormalFormCoefficients(
        mu_S=mu_S, alpha=alpha, beta=beta, gamma=gamma, source="resolvent",
        re_gamma_conj_beta=float((gamma * np.conj(beta)).real), structure_defects=defects,
        near_contributions={"alpha_two_nearest": near_alpha},
    )
    return A, nf


def stencil(kappa_max: float = 1e-2, directions: int = 16, radii: int = 4) -> np.ndarray:
    rs = np.geomspace(kappa_max / 8.0, kappa_max, radii)
    th = 2.0 * np.pi * np.arange(directions) / directions
    return np.array([[r * np.cos(t), r * np.sin(t)] for r in rs for t in th])


def pair_near_M(V: FourierPotential, eps: float, kappas, mu_S: float,
                basis: PlaneWaveBasis | None = None, N: int = 12, threads: int = 1,
                B: int | None = None) -> np.ndarray:
    """(mu_minus, mu_plus) at M + kappa: the two eigenvalues nearest mu_S."""
    basis = make_basis(N) if basis is None else basis
    vmat = potential_matrix(V, basis)
    if B is None:
        # only the bands up to the pair (plus one) are needed
        wM, _ = eigensolve(assemble(V, eps, M_POINT, basis, vmat), vectors=False)
        B = min(basis.dim, int(np.searchsorted(wM, mu_S + default_cluster_tol(mu_S))) + 2)

    def one(kap):
        w, _ = eigensolve(assemble(V, eps, M_POINT + np.asarray(kap), basis, vmat), B, vectors=False)
        two = np.sort(w[np.argsort(np.abs(w - mu_S))[:2]])
        return two

    kappas = [np.asarray(k, float) for k in kappas]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return np.array(list(ex.map(one, kappas)))
    return np.array([one(k) for k in kappas])


FIT_REJECT = 1e-2


def fit_normal_form(kappas, mu_plus, mu_minus, mu_S: float,
                    reject: float = FIT_REJECT) -> NormalFormCoefficients:
    """Least-squares fit of the mean and squared half-gap of the pair."""
    K = np.asarray(kappas, float)
    mp, mm = np.asarray(mu_plus, float), np.asarray(mu_minus, float)
    k1, k2 = K[:, 0], K[:, 1]
    s = 0.5 * (mp + mm) - mu_S
    d2 = 0.25 * (mp - mm) ** 2
    r2 = k1**2 + k2**2
    u, w = k1**2 - k2**2, k1 * k2

    c_s = np.dot(r2, s) / np.dot(r2, r2)
    res_s = np.linalg.norm(c_s * r2 - s) / max(np.linalg.norm(s), 1e-300)

    D = np.stack([u**2, w**2, u * w], axis=1)
    g, *_ = np.linalg.lstsq(D, d2, rcond=None)
    res_d = np.linalg.norm(D @ g - d2) / max(np.linalg.norm(d2), 1e-300)

    residual = float(max(res_s, res_d))
    if residual > reject:
        raise NumericalError(f"normal-form fit rejected: relative residual {residual:.3e} > {reject:g}")
    g1, g2, g3 = g
    gamma_abs = float(np.sqrt(max(g1, 0.0)))
    beta_abs = float(np.sqrt(max(g2, 0.0)) / 2.0)
    return NormalFormCoefficients(
        mu_S=mu_S, alpha=float(1.0 - c_s), beta=complex(beta_abs), gamma=complex(gamma_abs),
        source="fit", fit_residual=residual, re_gamma_conj_beta=float(g3 / 4.0),
    )


def fit_from_potential(V: FourierPotential, eps: float, kappa_max: float = 1e-2,
                       basis: PlaneWaveBasis | None = None, N: int = 12, threads: int = 1,
                       mu_S: float | None = None) -> NormalFormCoefficients:
    basis = make_basis(N) if basis is None else basis
    if mu_S is None:
        mu_S = degenerate_pair(V, eps, build_orbit_table(basis.N), basis)[0]
    ks = stencil(kappa_max)
    pair = pair_near_M(V, eps, ks, mu_S, basis, threads=threads)
    return fit_normal_form(ks, pair[:, 1], pair[:, 0], mu_S)


def dispersion_model(nf: NormalFormCoefficients, kappa) -> tuple[float, float]:
    k1, k2 = kappa
    q = abs(nf.gamma * (k1**2 - k2**2) + 2 * nf.beta * k1 * k2)
    base = (1 - nf.alpha) * (k1**2 + k2**2)
    return nf.mu_S + base - q, nf.mu_S + base + q


def symmetry_check_near_M(V: FourierPotential, eps: float, kappa_list, N: int = 12,
                          mu_S: float | None = None, tol: float = 1e-8) -> dict:
    """Compare the pair at M + kappa with M + R kappa (and M + rho kappa if reflection-invariant)."""
    basis = make_basis(N)
    if mu_S is None:
        mu_S = degenerate_pair(V, eps, build_orbit_table(N), basis)[0]
    K = np.asarray(kappa_list, float).reshape(-1, 2)
    base = pair_near_M(V, eps, K, mu_S, basis)
    rot = pair_near_M(V, eps, K @ R_MATRIX.T, mu_S, basis)
    report = {"rotation_max": float(np.max(np.abs(base - rot))) if len(K) else 0.0}
    if validate_admissible(V).is_reflection_invariant:
        refl = pair_near_M(V, eps, K @ RHO_MATRIX.T, mu_S, basis)
        report["reflection_max"] = float(np.max(np.abs(base - refl))) if len(K) else 0.0
    else:
        report["reflection_max"] = None
    report["passed"] = report["rotation_max"] <= tol and (
        report["reflection_max"] is None or report["reflection_max"] <= tol)
    return report


@dataclass(frozen=True)
class EffectiveMassTensor:
    upsilon: np.ndarray  # [p, q, r, s], zero-based

    def entry(self, p, q, r, s) -> complex:
        return complex(self.upsilon[p - 1, q - 1, r - 1, s - 1])


def effective_mass_tensor(A: AMatrices) -> EffectiveMassTensor:
    ups = np.zeros((2, 2, 2, 2), dtype=complex)
    for p in (1, 2):
        for q in (1, 2):
            blk = A.block(p, q)
            for r in (1, 2):
                for s in (1, 2):
                    ups[p - 1, q - 1, r - 1, s - 1] = float(p == q and r == s) - 4 * blk[r - 1, s - 1]
    return EffectiveMassTensor(ups)


def envelope_dispersion(T: EffectiveMassTensor, kappa) -> np.ndarray:
    """Eigenvalues of the 2x2 symbol sum_{rs} Upsilon^{pq}_{rs} k_r k_s."""
    k = np.asarray(kappa, float)
    sym = np.einsum("pqrs,r,s->pq", T.upsilon, k, k)
    return np.linalg.eigvalsh(0.5 * (sym + sym.conj().T))
