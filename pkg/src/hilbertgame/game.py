"""Two-player quantum games and their payoff tensors.

A game is the initial density ``rho0`` of the two-particle quantum object
(basis ``|UU>, |UD>, |DU>, |DD>``) together with one payoff scale matrix per
player. Payoffs can be evaluated three equivalent ways:

* operator form: ``Tr(P (u1⊗u2) rho0 (u1⊗u2)^†)``;
* state form: ``<S|H|S>`` on the 16-dim system strategy space;
* density form: ``Tr(rho_S H)``.

System strategy index is ``4*idx(a1) + idx(a2)`` over the base strategies
``(Nc, Fc, Nq, Fq)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cmatrix import EQ_TOL, HERMITIAN_TOL, as_cmatrix, dagger, is_hermitian, partial_trace
from .errors import InvalidDensityError, NotHermitianError, NumericalConsistencyError, RejectedInput
from .strategy import BASIS, base_operator, is_unitary, reconstruct

DENSITY_TOL = 1e-10
CLASSICAL_INDICES = (0, 1, 4, 5)  # |NcNc>, |NcFc>, |FcNc>, |FcFc>

# kron(b_a1, b_a2) for all 16 system base vectors, shape (16, 4, 4)
SYSTEM_BASIS = np.einsum("aij,bkl->abikjl", BASIS, BASIS).reshape(16, 4, 4)


def _check_density(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    rho = as_cmatrix(rho, square=True, name="density")
    if not is_hermitian(rho, tol):
        raise InvalidDensityError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidDensityError(f"density trace is {np.trace(rho).real:.12g}, expected 1")
    if np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0] < -tol:
        raise InvalidDensityError("density matrix is not positive semidefinite")
    return rho


def validate_density(rho, dim: int | None = None, tol: float = DENSITY_TOL) -> np.ndarray:
    """Return ``rho`` as an array after checking Hermitian, PSD, unit trace (and side ``dim``)."""
    rho = _check_density(rho, tol)
    if dim is not None and rho.shape[0] != dim:
        raise InvalidDensityError(f"expected a {dim}x{dim} density, got {rho.shape}")
    return rho


def pure_density(vec) -> np.ndarray:
    """Projector onto ``vec``, normalised to unit trace."""
    v = np.asarray(vec, dtype=np.complex128).ravel()
    norm2 = np.vdot(v, v).real
    if norm2 == 0.0:
        raise RejectedInput("cannot build a density from the zero vector")
    return np.outer(v, v.conj()) / norm2


@dataclass(frozen=True)
class MixedClassicalStrategy:
    p_nc: float
    p_fc: float

    def __post_init__(self):
        if min(self.p_nc, self.p_fc) < 0 or max(self.p_nc, self.p_fc) > 1:
            raise RejectedInput("mixture probabilities must lie in [0, 1]")
        if abs(self.p_nc + self.p_fc - 1.0) > EQ_TOL:
            raise RejectedInput("mixture probabilities must sum to 1")

    def density(self) -> np.ndarray:
        return np.diag([self.p_nc, self.p_fc, 0.0, 0.0]).astype(np.complex128)


def classical_mixture(p_nc: float) -> np.ndarray:
    """Single-player density ``p_nc|Nc><Nc| + (1-p_nc)|Fc><Fc|``."""
    return MixedClassicalStrategy(p_nc, 1.0 - p_nc).density()


def product_density(rho1, rho2) -> np.ndarray:
    rho1 = validate_density(rho1, 4)
    rho2 = validate_density(rho2, 4)
    return np.kron(rho1, rho2)


def product_state(v1, v2) -> np.ndarray:
    """System strategy vector ``|s1, s2>`` from two coefficient vectors."""
    return np.kron(np.asarray(v1, dtype=np.complex128), np.asarray(v2, dtype=np.complex128))


def split_product(state, tol: float = 1e-9):
    """Factor a 16-vector as ``v1 ⊗ v2`` with equal norms, or return ``None`` if entangled."""
    m = np.asarray(state, dtype=np.complex128).reshape(4, 4)
    u, sv, vh = np.linalg.svd(m)
    if sv[0] == 0.0 or sv[1] > tol * sv[0]:
        return None
    root = np.sqrt(sv[0])
    return u[:, 0] * root, vh[0] * root


def marginal(rho, player: int) -> np.ndarray:
    """Density of ``player`` (1 or 2) obtained by tracing out the other one."""
    if player not in (1, 2):
        raise RejectedInput(f"player must be 1 or 2, got {player!r}")
    return partial_trace(rho, (4, 4), 2 - player)


def _real(value, tol: float = EQ_TOL, what: str = "payoff"):
    value = np.asarray(value)
    scale = np.maximum(1.0, np.abs(value))
    if np.any(np.abs(value.imag) > tol * scale):
        raise NumericalConsistencyError(f"{what} has imaginary part {np.max(np.abs(value.imag)):.3g}")
    out = value.real
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GameDefinition:
    """Initial object state plus the two payoff scale matrices.

    ``params`` holds ``(r, s, t, p)`` when the game was built by
    :func:`canonical_pd`; general games leave it ``None``.
    """

    rho0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    params: tuple[float, float, float, float] | None = None
    _tensors: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        rho0 = _check_density(self.rho0).copy()
        if rho0.shape != (4, 4):
            raise InvalidDensityError(f"rho0 must be 4x4, got {rho0.shape}")
        object.__setattr__(self, "rho0", rho0)
        for name in ("p1", "p2"):
            m = as_cmatrix(getattr(self, name), square=True, name=name.upper()).copy()
            if m.shape != (4, 4):
                raise RejectedInput(f"{name.upper()} must be 4x4, got {m.shape}")
            if not is_hermitian(m, HERMITIAN_TOL):
                raise NotHermitianError(f"payoff scale matrix {name.upper()} is not Hermitian")
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        rho0.setflags(write=False)

    def scale(self, player: int) -> np.ndarray:
        if player == 1:
            return self.p1
        if player == 2:
            return self.p2
        raise RejectedInput(f"player must be 1 or 2, got {player!r}")

    def tensor(self, player: int) -> np.ndarray:
        """Cached :func:`build_payoff_tensor` result."""
        if player not in self._tensors:
            self._tensors[player] = build_payoff_tensor(self, player)
        return self._tensors[player]

    @property
    def is_diagonal_product_game(self) -> bool:
        """Diagonal payoff scales and ``rho0 = |UU><UU|``: the closed-form payoff applies."""
        uu = np.zeros((4, 4))
        uu[0, 0] = 1.0
        off = lambda m: np.linalg.norm(m - np.diag(np.diag(m)))  # noqa: E731
        return bool(
            np.allclose(self.rho0, uu, atol=EQ_TOL)
            and off(self.p1) <= EQ_TOL
            and off(self.p2) <= EQ_TOL
        )


def canonical_pd(r: float, s: float, t: float, p: float) -> GameDefinition:
    """Prisoner's Dilemma: ``rho0 = |UU><UU|``, ``P1 = diag(r,s,t,p)``, ``P2 = diag(r,t,s,p)``."""
    rho0 = np.zeros((4, 4), dtype=np.complex128)
    rho0[0, 0] = 1.0
    return GameDefinition(
        rho0,
        np.diag([r, s, t, p]).astype(np.complex128),
        np.diag([r, t, s, p]).astype(np.complex128),
        params=(float(r), float(s), float(t), float(p)),
    )


def payoff_operator_form(g: GameDefinition, u1, u2, player: int, tol: float = EQ_TOL):
    """``Tr(P (u1⊗u2) rho0 (u1⊗u2)^†)``. Stacks of operators broadcast."""
    u1 = np.asarray(u1, dtype=np.complex128)
    u2 = np.asarray(u2, dtype=np.complex128)
    k = np.einsum("...ij,...kl->...ikjl", u1, u2)
    k = k.reshape(k.shape[:-4] + (4, 4))
    value = np.einsum("ij,...jk,kl,...il->...", g.scale(player), k, g.rho0, k.conj())
    return _real(value, tol)


def build_payoff_tensor(g: GameDefinition, player: int) -> np.ndarray:
    """16x16 payoff tensor with ``H[a, b] = Tr(P (b1⊗b2) rho0 (a1⊗a2)^†)``."""
    h = np.einsum(
        "ij,bjk,kl,ail->ab", g.scale(player), SYSTEM_BASIS, g.rho0, SYSTEM_BASIS.conj()
    )
    return 0.5 * (h + dagger(h))


def payoff_state_form(h, state, tol: float = EQ_TOL):
    """``<S|H|S>``; ``state`` may be a stack of 16-vectors."""
    s = np.asarray(state, dtype=np.complex128)
    return _real(np.einsum("...a,ab,...b->...", s.conj(), h, s), tol)


def payoff_density_form(h, rho, tol: float = EQ_TOL) -> float:
    rho = validate_density(rho, 16)
    return _real(np.trace(rho @ h), tol)


def classical_submatrix(h) -> np.ndarray:
    """Restriction of a payoff tensor to ``|NcNc>, |NcFc>, |FcNc>, |FcFc>``."""
    idx = np.array(CLASSICAL_INDICES)
    return np.asarray(h)[np.ix_(idx, idx)]


def classical_payoff_table(g: GameDefinition, player: int) -> np.ndarray:
    """2x2 table ``G[a1, a2]`` for pure classical strategies (rows: player 1)."""
    ops = [base_operator("Nc"), base_operator("Fc")]
    return np.array([[payoff_operator_form(g, a, b, player) for b in ops] for a in ops])


def factor_unitary_flags(state, tol: float = 1e-9) -> tuple[bool, bool]:
    """Whether each factor of a product system state is a unitary operator (False if entangled)."""
    factors = split_product(state, tol)
    if factors is None:
        return (False, False)
    return tuple(is_unitary(reconstruct(f), 1e-8) for f in factors)
