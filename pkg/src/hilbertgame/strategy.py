"""Single-player strategy space.

A strategy is a 2x2 complex operator acting on the player's particle. The
four base operators ``(Nc, Fc, Nq, Fq)`` are orthonormal under
``(s, s') = Tr(s^† s') / Tr(I)`` and span all 2x2 matrices, so every
operator has a 4-component coefficient vector in that (fixed) order.

Coefficient vectors are stored in basis order. A display written as
``xi*Nc + x*Fc + y*Fq + z*Nq`` is therefore stored as ``(xi, x, z, y)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cmatrix import dagger
from .errors import RejectedInput

BASIS_NAMES = ("Nc", "Fc", "Nq", "Fq")

BASIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[1, 0], [0, -1]],
        [[0, -1j], [1j, 0]],
    ],
    dtype=np.complex128,
)
BASIS.setflags(write=False)

UNITARY_TOL = 1e-10


def base_operator(name: str) -> np.ndarray:
    try:
        return BASIS[BASIS_NAMES.index(name)].copy()
    except ValueError:
        raise RejectedInput(f"unknown base strategy {name!r}; expected one of {BASIS_NAMES}") from None


def basis_vector(name: str) -> np.ndarray:
    """Coefficient vector of a base strategy, e.g. ``|Nc>``."""
    v = np.zeros(4, dtype=np.complex128)
    v[BASIS_NAMES.index(name)] = 1.0
    return v


def inner_product(s, t) -> complex:
    s = np.asarray(s, dtype=np.complex128)
    t = np.asarray(t, dtype=np.complex128)
    return complex(np.trace(dagger(s) @ t) / s.shape[-1])


def unitary_theta_phi(theta: float, phi: float) -> np.ndarray:
    """The two-angle strategy family ``[[e^{iφ}cos(θ/2), sin(θ/2)], [-sin(θ/2), e^{-iφ}cos(θ/2)]]``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[np.exp(1j * phi) * c, s], [-s, np.exp(-1j * phi) * c]], dtype=np.complex128
    )


def euler_coefficients(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Basis coefficients of ``unitary_general(alpha, beta, gamma)``."""
    cg, sg = np.cos(gamma / 2), np.sin(gamma / 2)
    plus, minus = (alpha + beta) / 2, (alpha - beta) / 2
    return np.array(
        [
            cg * np.cos(plus),
            -1j * sg * np.sin(minus),
            -1j * cg * np.sin(plus),
            -1j * sg * np.cos(minus),
        ],
        dtype=np.complex128,
    )


def unitary_general(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Three-angle SU(2) family, built as a combination of the base operators."""
    return reconstruct(euler_coefficients(alpha, beta, gamma))


def expand(s) -> np.ndarray:
    """Coefficients ``(b_k, s)`` of ``s`` over ``(Nc, Fc, Nq, Fq)``; accepts stacks ``(..., 2, 2)``."""
    s = np.asarray(s, dtype=np.complex128)
    if s.shape[-2:] != (2, 2):
        raise RejectedInput(f"strategy operators are 2x2, got {s.shape}")
    # Tr(b^† s)/2 with b Hermitian: sum_ij conj(b_ji) s_ji / 2
    return np.einsum("kij,...ij->...k", BASIS.conj(), s) / 2


def reconstruct(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.shape[-1] != 4:
        raise RejectedInput(f"strategy vectors have 4 coefficients, got {v.shape}")
    return np.einsum("...k,kij->...ij", v, BASIS)


def is_unitary(s, tol: float = UNITARY_TOL) -> bool:
    s = np.asarray(s, dtype=np.complex128)
    return bool(np.linalg.norm(dagger(s) @ s - np.eye(s.shape[-1])) <= tol)


def euler_angles(u) -> tuple[float, float, float]:
    """Angles ``(alpha, beta, gamma)`` with ``unitary_general(...) == u`` up to a global phase.

    ``alpha`` and ``beta`` are reduced into ``[-pi, pi]``. Where they are not
    determined (``gamma`` equal to 0 or pi), the free combination is set to 0.
    """
    u = np.asarray(u, dtype=np.complex128)
    if not is_unitary(u, 1e-8):
        raise RejectedInput("euler_angles requires a unitary operator")
    det = np.linalg.det(u)
    u = u / np.sqrt(det)
    v = expand(u)
    # SU(2): v = (c0, -i c1, -i c3, -i c2) with (c0..c3) real
    c0, c1, c3, c2 = v[0].real, -v[1].imag, -v[2].imag, -v[3].imag
    gamma = 2 * np.arctan2(np.hypot(c1, c2), np.hypot(c0, c3))
    plus = np.arctan2(c3, c0) if np.hypot(c0, c3) > 1e-12 else 0.0
    minus = np.arctan2(c1, c2) if np.hypot(c1, c2) > 1e-12 else 0.0
    alpha, beta = plus + minus, plus - minus
    return (_wrap(alpha), _wrap(beta), float(gamma))


def _wrap(angle: float) -> float:
    return float((angle + np.pi) % (2 * np.pi) - np.pi)


@dataclass(frozen=True)
class ThetaPhi:
    """Parameters of the two-angle family (``theta`` in [0, pi], ``phi`` in [0, pi/2])."""

    theta: float
    phi: float = 0.0

    def operator(self) -> np.ndarray:
        return unitary_theta_phi(self.theta, self.phi)

    @property
    def mixing_angle(self) -> float:
        return self.theta

    def as_dict(self) -> dict:
        return {"theta": self.theta, "phi": self.phi}


@dataclass(frozen=True)
class Euler:
    """Parameters of the three-angle family (``alpha, beta`` in [-pi, pi], ``gamma`` in [0, pi])."""

    alpha: float
    beta: float
    gamma: float

    def operator(self) -> np.ndarray:
        return unitary_general(self.alpha, self.beta, self.gamma)

    @property
    def mixing_angle(self) -> float:
        return self.gamma

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


UnitaryParams = ThetaPhi | Euler


def parse_params(text: str) -> UnitaryParams:
    """Parse ``"theta=0,phi=1.57"`` or ``"alpha=..,beta=..,gamma=.."`` (radians)."""
    values = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, raw = item.partition("=")
        if not sep:
            raise RejectedInput(f"expected key=value, got {item!r}")
        try:
            values[key.strip()] = float(raw)
        except ValueError:
            raise RejectedInput(f"bad angle value {raw!r} for {key!r}") from None
    keys = set(values)
    if keys <= {"theta", "phi"} and "theta" in keys:
        return ThetaPhi(values["theta"], values.get("phi", 0.0))
    if keys == {"alpha", "beta", "gamma"}:
        return Euler(values["alpha"], values["beta"], values["gamma"])
    raise RejectedInput(f"unrecognised parameter set {sorted(keys)}; use theta[,phi] or alpha,beta,gamma")
