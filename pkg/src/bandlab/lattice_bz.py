"""Square-lattice geometry: dual indices, rotation maps, orbit tables and k-paths.

The lattice constant is 1, so the dual basis is k1 = (2*pi, 0), k2 = (0, 2*pi)
and a dual index m = (m1, m2) stands for the vector 2*pi*m.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DualIndex = tuple[int, int]

GAMMA = np.array([0.0, 0.0])
X_POINT = np.array([np.pi, 0.0])
M_POINT = np.array([np.pi, np.pi])

# (0,0) -> (0,-1) -> (-1,-1) -> (-1,0) under the orbit map
VERTEX_ORBIT: tuple[DualIndex, ...] = ((0, 0), (0, -1), (-1, -1), (-1, 0))
VERTEX_REPRESENTATIVE: DualIndex = (-1, 0)

# clockwise quarter turn, R @ (x1, x2) = (x2, -x1)
R_MATRIX = np.array([[0.0, 1.0], [-1.0, 0.0]])
RHO_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]])


def rotate_index_tilde(m: DualIndex) -> DualIndex:
    """Quarter-turn action on Fourier indices of a rotation-invariant potential."""
    return (-m[1], m[0])


def rotate_index_orbit(m: DualIndex) -> DualIndex:
    """Index map induced by rotating M + 2*pi*m about the origin."""
    return (m[1], -1 - m[0])


def m_norm_sq_shift(m: DualIndex) -> int:
    """Integer s with |M + 2*pi*m|^2 = 2*pi^2 + 4*pi^2 * s."""
    return m[0] * m[0] + m[1] * m[1] + m[0] + m[1]


def m_norm_sq(m: DualIndex) -> float:
    return 2.0 * np.pi**2 + 4.0 * np.pi**2 * m_norm_sq_shift(m)


def box_indices(N: int) -> np.ndarray:
    """Row-major index box max(|m_i + 1/2|) <= N + 1/2, i.e. m_i in [-N-1, N].

    The box is centred on (-1/2, -1/2) so it is mapped onto itself by the
    orbit map, which keeps the truncated problem exactly symmetric at M.
    """
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    r = np.arange(-N - 1, N + 1)
    m1, m2 = np.meshgrid(r, r, indexing="ij")
    return np.stack([m1.ravel(), m2.ravel()], axis=1)


def orbit(m: DualIndex) -> list[DualIndex]:
    out = [m]
    for _ in range(3):
        out.append(rotate_index_orbit(out[-1]))
    return out


@dataclass(frozen=True)
class OrbitTable:
    N: int
    representatives: list[DualIndex]
    orbit_of: dict[DualIndex, tuple[DualIndex, int]]

    def members(self) -> list[DualIndex]:
        return list(self.orbit_of)

    def position(self) -> dict[DualIndex, int]:
        """Row index of each representative in sector matrices."""
        return {r: i for i, r in enumerate(self.representatives)}


def build_orbit_table(N: int) -> OrbitTable:
    """Partition the truncation box into 4-cycles of the orbit map.

    Orbits leaving the box would be completed, though for the centred box
    every orbit already lies inside it.
    """
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    seen: set[DualIndex] = set()
    reps: list[DualIndex] = []
    orbit_of: dict[DualIndex, tuple[DualIndex, int]] = {}
    for row in box_indices(N):
        m = (int(row[0]), int(row[1]))
        if m in seen:
            continue
        cyc = orbit(m)
        rep = VERTEX_REPRESENTATIVE if m in VERTEX_ORBIT else min(cyc)
        start = cyc.index(rep)
        cyc = cyc[start:] + cyc[:start]
        for j, member in enumerate(cyc):
            orbit_of[member] = (rep, j)
            seen.add(member)
        reps.append(rep)
    reps.sort(key=lambda r: (m_norm_sq_shift(r), r))
    return OrbitTable(N=N, representatives=reps, orbit_of=orbit_of)


@dataclass(frozen=True)
class KPath:
    waypoints: list[np.ndarray]
    samples_per_segment: int
    points: np.ndarray = field(repr=False)
    arclength: np.ndarray = field(repr=False)


def standard_path(samples: int) -> KPath:
    """Closed circuit Gamma -> X -> M -> Gamma with `samples` points per segment.

    Segment endpoints are shared, so the path holds 3*(samples-1)+1 points.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples per segment")
    wps = [GAMMA, X_POINT, M_POINT, GAMMA]
    pts = [wps[0][None, :]]
    for a, b in zip(wps[:-1], wps[1:]):
        t = np.linspace(0.0, 1.0, samples)[1:, None]
        pts.append(a + t * (b - a))
    points = np.vstack(pts)
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(steps)])
    return KPath(waypoints=[w.copy() for w in wps], samples_per_segment=samples,
                 points=points, arclength=s)
