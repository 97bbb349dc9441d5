"""Small-eps predictions at M: first-order eigenvalues, leading normal-form
coefficients, the ordering classification and the symmetry-breaking splitting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potential import FourierPotential

TWO_PI_SQ = 2.0 * np.pi**2
GUARD = 1e-12

ORDERINGS = {
    "1a": "mu_{+i} = mu_{-i} < mu_{+1} < mu_{-1}",
    "1b": "mu_{+i} = mu_{-i} < mu_{-1} < mu_{+1}",
    "2a": "mu_{+1} < mu_{+i} = mu_{-i} < mu_{-1}",
    "2b": "mu_{-1} < mu_{+i} = mu_{-i} < mu_{+1}",
    "3a": "mu_{+1} < mu_{-1} < mu_{+i} = mu_{-i}",
    "3b": "mu_{-1} < mu_{+1} < mu_{+i} = mu_{-i}",
    "none": "",
}

# sector labels listed from lowest to highest; "S" is the +-i pair
ORDER_SEQUENCES = {
    "1a": ("S", "+1", "-1"),
    "1b": ("S", "-1", "+1"),
    "2a": ("+1", "S", "-1"),
    "2b": ("-1", "S", "+1"),
    "3a": ("+1", "-1", "S"),
    "3b": ("-1", "+1", "S"),
}


def vertex_coefficients(V: FourierPotential) -> tuple[float, float, float]:
    """(V00, V01, V11) with V01 = V_(0,1) and V11 = V_(1,1)."""
    return tuple(float(V.coefficient(m).real) for m in ((0, 0), (0, 1), (1, 1)))


@dataclass(frozen=True)
class FirstOrderPrediction:
    mu_S: float
    mu_plus1: float
    mu_minus1: float
    eps: float
    nondegenerate: bool

    def sequence(self) -> tuple[str, ...]:
        vals = {"S": self.mu_S, "+1": self.mu_plus1, "-1": self.mu_minus1}
        return tuple(sorted(vals, key=vals.get))


def first_order(V: FourierPotential, eps: float) -> FirstOrderPrediction:
    V00, V01, V11 = vertex_coefficients(V)
    return FirstOrderPrediction(
        mu_S=TWO_PI_SQ + eps * (V00 - V11),
        mu_plus1=TWO_PI_SQ + eps * (V00 + 2 * V01 + V11),
        mu_minus1=TWO_PI_SQ + eps * (V00 - 2 * V01 + V11),
        eps=eps,
        nondegenerate=abs(V11 - V01) > GUARD and abs(V11 + V01) > GUARD,
    )


def leading_coefficients(V: FourierPotential, eps: float) -> tuple[float, complex, complex]:
    """Closed-form small-eps (alpha, beta, gamma) with the 32 pi^2 / eps prefactor.

    The prefactor is the one obtained with unit-amplitude four-term vertex
    states (norm 2 each). With unit-norm states, which is what the resolvent
    sums use, every coefficient is 1/16 of this; see `leading_coefficients_unit`.
    """
    _, V01, V11 = vertex_coefficients(V)
    if eps == 0:
        raise ValueError("eps must be nonzero")
    den = V11**2 - V01**2
    if abs(V11 - V01) <= GUARD or abs(V11 + V01) <= GUARD:
        raise ValueError("V11 = +-V01: the +-1 sectors are degenerate at first order")
    c = 32.0 * np.pi**2 / eps
    alpha = c * V11 / den
    return alpha, complex(alpha), complex(-1j * c * V01 / den)


def leading_coefficients_unit(V: FourierPotential, eps: float) -> tuple[float, complex, complex]:
    """Same closed form evaluated with unit-norm vertex states (prefactor 2 pi^2 / eps)."""
    a, b, g = leading_coefficients(V, eps)
    return a / 16.0, b / 16.0, g / 16.0


@dataclass(frozen=True)
class OrderingCase:
    label: str
    ordering: str


def ordering_case(V: FourierPotential) -> OrderingCase:
    _, V01, V11 = vertex_coefficients(V)
    g = GUARD
    aV01, aV11 = abs(V01), abs(V11)
    if V11 > g and V01 < -g and aV01 < aV11 - g:
        lab = "1a"
    elif 0 + g < V01 < V11 - g:
        lab = "1b"
    elif V11 < -g and V01 < -g and aV01 > aV11 + g:
        lab = "2a"
    elif V11 < -g and V01 > aV11 + g:
        lab = "2b"
    elif V11 < -g and V01 < -g and aV01 < aV11 - g:
        lab = "3a"
    elif V11 < -g and V01 > g and aV01 < aV11 - g:
        lab = "3b"
    else:
        lab = "none"
    return OrderingCase(lab, ORDERINGS[lab])


def convolve(u: np.ndarray, W: FourierPotential, v: np.ndarray, indices: np.ndarray) -> complex:
    """<u, W v> = sum_{m,n} conj(u_m) W_{m-n} v_n over a common index list."""
    d = indices[:, None, :] - indices[None, :, :]
    Wmat = W.lookup(d[..., 0], d[..., 1])
    return complex(np.vdot(u, Wmat @ v))


def deformation_splitting(phi1: np.ndarray, phi2: np.ndarray, W: FourierPotential, eta: float,
                          indices: np.ndarray, mu_S: float = TWO_PI_SQ):
    """First-order splitting of the degenerate pair under eta * W.

    Returns (nu_plus, nu_minus, diag, offdiag_mod).
    """
    diag = convolve(phi1, W, phi1, indices).real
    off = abs(convolve(phi1, W, phi2, indices))
    return mu_S + eta * diag + eta * off, mu_S + eta * diag - eta * off, diag, off
