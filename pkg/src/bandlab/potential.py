"""Periodic potentials stored as Fourier coefficient tables.

Convention: V(x) = sum_m V_m exp(2*pi*i m.x), V_m = integral over [0,1)^2 of
V(x) exp(-2*pi*i m.x) dx. Coefficients live in a dense (2*N_V+1)^2 array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice_bz import DualIndex, rotate_index_tilde


@dataclass(frozen=True)
class FourierPotential:
    coefficients: np.ndarray  # shape (2*N_V+1, 2*N_V+1), index [m1+N_V, m2+N_V]
    N_V: int
    metadata: str = ""

    def __post_init__(self):
        n = 2 * self.N_V + 1
        if self.coefficients.shape != (n, n):
            raise ValueError(f"coefficient array must be {n}x{n}")
        self.coefficients.setflags(write=False)

    def coefficient(self, m: DualIndex) -> complex:
        """V_m, zero outside the stored range."""
        N = self.N_V
        if abs(m[0]) > N or abs(m[1]) > N:
            return 0.0
        return complex(self.coefficients[m[0] + N, m[1] + N])

    def lookup(self, d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
        """Vectorised V_{(d1,d2)} with out-of-range entries set to 0."""
        N = self.N_V
        inside = (np.abs(d1) <= N) & (np.abs(d2) <= N)
        out = np.zeros(np.shape(d1), dtype=complex)
        out[inside] = self.coefficients[d1[inside] + N, d2[inside] + N]
        return out

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))

    def indices(self) -> np.ndarray:
        r = np.arange(-self.N_V, self.N_V + 1)
        m1, m2 = np.meshgrid(r, r, indexing="ij")
        return np.stack([m1.ravel(), m2.ravel()], axis=1)

    def __add__(self, other: "FourierPotential") -> "FourierPotential":
        N = max(self.N_V, other.N_V)
        return FourierPotential(_pad(self, N) + _pad(other, N), N,
                                f"{self.metadata} + {other.metadata}")

    def scaled(self, c: float) -> "FourierPotential":
        return FourierPotential(c * self.coefficients, self.N_V, f"{c} * ({self.metadata})")


def _pad(V: FourierPotential, N: int) -> np.ndarray:
    out = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
    o = N - V.N_V
    out[o:o + 2 * V.N_V + 1, o:o + 2 * V.N_V + 1] = V.coefficients
    return out


def zero_potential(N_V: int = 1) -> FourierPotential:
    return FourierPotential(np.zeros((2 * N_V + 1, 2 * N_V + 1), dtype=complex), N_V, "zero")


def from_coefficients(table: dict[DualIndex, complex], N_V: int | None = None,
                      metadata: str = "explicit") -> FourierPotential:
    """Raw coefficient table, no symmetrization (used to build test cases)."""
    if N_V is None:
        N_V = max([1] + [max(abs(m[0]), abs(m[1])) for m in table])
    arr = np.zeros((2 * N_V + 1, 2 * N_V + 1), dtype=complex)
    for m, v in table.items():
        arr[m[0] + N_V, m[1] + N_V] += v
    return FourierPotential(arr, N_V, metadata)


def from_cosine_modes(modes: list[tuple[DualIndex, float]], N_V: int | None = None) -> FourierPotential:
    """Sum of rotation-symmetrized modes.

    Each (m, a) adds a to every distinct member of {m, R~m, -m, -R~m}, which is
    2a[cos(2 pi m.x) + cos(2 pi R~m.x)] for m != 0.
    """
    table: dict[DualIndex, complex] = {}
    for m, a in modes:
        m = (int(m[0]), int(m[1]))
        orb = {m}
        cur = m
        for _ in range(3):
            cur = rotate_index_tilde(cur)
            orb.add(cur)
        for q in orb:
            table[q] = table.get(q, 0.0) + float(a)
    if N_V is None:
        N_V = max([1] + [max(abs(q[0]), abs(q[1])) for q in table])
    desc = "cosine " + ", ".join(f"{m}:{a}" for m, a in modes)
    return from_coefficients(table, N_V, desc)


def from_gaussian_lattice(centers, signs, V0: float, sigma: float, N_V: int) -> FourierPotential:
    """Periodized Gaussians s_i * V0 * exp(-|x - c_i|^2 / sigma).

    Coefficients are exact (Poisson summation):
    V_m = sum_i s_i V0 pi sigma exp(-sigma pi^2 |m|^2) exp(-2 pi i m.c_i).
    A sign of -1 gives a well.
    """
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    signs = np.asarray(signs, dtype=float).ravel()
    if len(centers) != len(signs):
        raise ValueError("centers and signs must have the same length")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    r = np.arange(-N_V, N_V + 1)
    m1, m2 = np.meshgrid(r, r, indexing="ij")
    envelope = V0 * np.pi * sigma * np.exp(-sigma * np.pi**2 * (m1**2 + m2**2))
    phase = np.zeros_like(envelope, dtype=complex)
    for (c1, c2), s in zip(centers, signs):
        phase += s * np.exp(-2j * np.pi * (m1 * c1 + m2 * c2))
    coef = envelope * phase
    if np.max(np.abs(coef.imag)) < 1e-12 * max(1.0, np.max(np.abs(coef))):
        coef = coef.real.astype(complex)
    desc = f"gaussian V0={V0} sigma={sigma} centers={centers.tolist()} signs={signs.tolist()}"
    return FourierPotential(coef, N_V, desc)


def from_samples(grid, N_V: int, metadata: str = "samples") -> FourierPotential:
    """DFT of an n x n grid sampled at x = (i/n, j/n), divided by n^2."""
    grid = np.asarray(grid, dtype=float)
    n = grid.shape[0]
    if grid.shape != (n, n):
        raise ValueError("grid must be square")
    if n < 2 * N_V + 2:
        raise ValueError(f"grid of {n}^2 samples cannot resolve N_V={N_V}; need n >= {2 * N_V + 2}")
    F = np.fft.fft2(grid) / n**2
    r = np.arange(-N_V, N_V + 1) % n
    return FourierPotential(F[np.ix_(r, r)].astype(complex), N_V, metadata)


def bump(d: np.ndarray, r: float = 0.2) -> np.ndarray:
    """C^1 bump (1 + cos(pi d / r)) / 2 supported on d < r."""
    return np.where(d < r, 0.5 * (1.0 + np.cos(np.pi * d / r)), 0.0)


def bump_samples(centers, signs, n: int = 512, r: float = 0.2) -> np.ndarray:
    """Sample sum_i s_i f(|x - x_i|) on an n x n grid, distances taken periodically."""
    x = np.arange(n) / n
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    out = np.zeros((n, n))
    for (c1, c2), s in zip(np.asarray(centers, float).reshape(-1, 2), signs):
        d1 = (X1 - c1 + 0.5) % 1.0 - 0.5
        d2 = (X2 - c2 + 0.5) % 1.0 - 0.5
        out += s * bump(np.hypot(d1, d2), r)
    return out


def from_bump_lattice(centers, signs, N_V: int, n: int = 512, r: float = 0.2) -> FourierPotential:
    desc = f"bump r={r} n={n} centers={np.asarray(centers, float).tolist()} signs={list(signs)}"
    return from_samples(bump_samples(centers, signs, n, r), N_V, desc)


@dataclass(frozen=True)
class SymmetryReport:
    is_real: bool
    is_even: bool
    is_rotation_invariant: bool
    is_reflection_invariant: bool
    max_violation: dict[str, float]

    @property
    def admissible(self) -> bool:
        return self.is_real and self.is_even and self.is_rotation_invariant


def validate_admissible(V: FourierPotential, tol: float = 1e-8) -> SymmetryReport:
    c = V.coefficients
    # index [i, j] <-> (i - N, j - N); -m flips both axes, R~ m = (-m2, m1)
    minus = c[::-1, ::-1]
    # rot[m] = V_{R~ m} = V_{(-m2, m1)}
    rot = c[::-1, :].T
    refl = c.T
    v = {
        "real": float(np.max(np.abs(c.imag))),
        "even": float(np.max(np.abs(c - minus))),
        "rotation": float(np.max(np.abs(c - rot))),
        "reflection": float(np.max(np.abs(c - refl))),
    }
    return SymmetryReport(
        is_real=v["real"] <= tol,
        is_even=v["even"] <= tol,
        is_rotation_invariant=v["rotation"] <= tol,
        is_reflection_invariant=v["reflection"] <= tol,
        max_violation=v,
    )


def evaluate(V: FourierPotential, x) -> float | np.ndarray:
    """Real part of the truncated Fourier sum at one point or an (..., 2) array of points."""
    x = np.asarray(x, dtype=float)
    idx = V.indices()
    phase = np.exp(2j * np.pi * (x[..., None, :] * idx).sum(-1))
    val = phase @ V.coefficients.ravel()
    return val.real if val.ndim else float(val.real)
