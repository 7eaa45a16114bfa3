"""Equilibrium analysis on the system strategy space.

Covers spectra of payoff tensors, common-eigenvector (GES) detection,
reduced payoff matrices and best responses, Nash verification of a given
strategy density, and grid scans of product profiles.

Degenerate eigenspaces are always handled through spectral projectors: the
payoff tensors of the Prisoner's Dilemma have a 12-dimensional null space,
so individual eigenvectors inside a cluster carry no meaning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cmatrix import EigenDecomposition, canonical_phase, dagger, eig_hermitian
from .errors import NumericalConsistencyError, RejectedInput
from .game import (
    GameDefinition,
    _real,
    classical_mixture,
    factor_unitary_flags,
    marginal,
    product_state,
    pure_density,
    split_product,
    validate_density,
)
from .strategy import (
    Euler,
    ThetaPhi,
    UnitaryParams,
    euler_angles,
    euler_coefficients,
    expand,
    is_unitary,
    reconstruct,
)

NE_TOL = 1e-9
CLUSTER_TOL = 1e-9
INTERSECTION_TOL = 1e-8
STRATEGY_SETS = ("full", "unitary", "classical")

# real unit 4-vectors c map onto SU(2) coefficient vectors as x = PHASES * c
_SU2_PHASES = np.array([1.0, -1j, -1j, -1j])


@dataclass(frozen=True)
class SpectrumReport:
    decomposition: EigenDecomposition
    clusters: list[list[int]]
    projectors: list[np.ndarray]

    @property
    def values(self) -> list[float]:
        """Mean eigenvalue of each cluster, descending."""
        ev = self.decomposition.eigenvalues
        return [float(np.mean(ev[c])) for c in self.clusters]

    @property
    def multiplicities(self) -> list[int]:
        return [len(c) for c in self.clusters]

    def basis(self, k: int) -> np.ndarray:
        """Orthonormal columns spanning cluster ``k``."""
        return self.decomposition.eigenvectors[:, self.clusters[k]]


@dataclass(frozen=True)
class CommonEigenstate:
    """A vector that is an eigenvector of both payoff tensors."""

    state: np.ndarray
    payoffs: tuple[float, float]
    unitary_flags: tuple[bool, bool]
    factors: tuple[np.ndarray, np.ndarray] | None


@dataclass(frozen=True)
class ReducedPayoff:
    matrix: np.ndarray
    player: int
    opponent_density: np.ndarray


@dataclass
class EquilibriumReport:
    kind: str  # classical-NE | unitary-NE | non-unitary-candidate | GES | none
    state: np.ndarray | None
    payoffs: tuple[float, float]
    unitary_flags: tuple[bool, bool]
    deviation_margin: float
    margins: tuple[float, float] = (math.nan, math.nan)
    best_responses: tuple[float, float] = (math.nan, math.nan)
    strategy_set: str | None = None
    profile: tuple | None = None
    grid_spacing: dict | None = None
    common_states: list[CommonEigenstate] = field(default_factory=list)

    @property
    def is_equilibrium(self) -> bool:
        return self.kind != "none"


def spectrum(h, cluster_tol: float = CLUSTER_TOL) -> SpectrumReport:
    """Eigendecomposition of ``h`` with (near-)degenerate eigenvalues grouped.

    Consecutive eigenvalues within ``cluster_tol * max(1, |lambda|_max)``
    share a cluster.
    """
    if cluster_tol <= 0:
        raise RejectedInput("cluster_tol must be positive")
    dec = eig_hermitian(h)
    ev = dec.eigenvalues
    gap = cluster_tol * max(1.0, float(np.max(np.abs(ev))))
    clusters = [[0]]
    for k in range(1, len(ev)):
        if ev[clusters[-1][-1]] - ev[k] <= gap:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    projectors = []
    for c in clusters:
        v = dec.eigenvectors[:, c]
        projectors.append(v @ dagger(v))
    return SpectrumReport(dec, clusters, projectors)


def subspace_intersection(basis1: np.ndarray, basis2: np.ndarray, tol: float = INTERSECTION_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the intersection of two column spaces.

    Uses the principal angles: singular values of ``B1^† B2`` equal to 1
    (within ``tol``) mark shared directions.
    """
    u, sv, _ = np.linalg.svd(dagger(basis1) @ basis2, full_matrices=False)
    keep = sv >= 1.0 - tol
    vecs = basis1 @ u[:, keep]
    return np.column_stack([canonical_phase(vecs[:, k]) for k in range(vecs.shape[1])]) if keep.any() else vecs


def _common_state(vec: np.ndarray, payoffs) -> CommonEigenstate:
    factors = split_product(vec)
    return CommonEigenstate(vec, tuple(float(x) for x in payoffs), factor_unitary_flags(vec), factors)


def ges_search(h1, h2, tol: float = INTERSECTION_TOL, cluster_tol: float = CLUSTER_TOL) -> EquilibriumReport:
    """Look for a common top eigenvector of both payoff tensors.

    The report's ``common_states`` additionally lists every common
    eigenvector at a non-top cluster (both eigenvalues not zero), e.g. the
    mutual-reward state of the Prisoner's Dilemma.
    """
    s1, s2 = spectrum(h1, cluster_tol), spectrum(h2, cluster_tol)
    zero1 = cluster_tol * max(1.0, abs(s1.values[0]), abs(s1.values[-1]))
    zero2 = cluster_tol * max(1.0, abs(s2.values[0]), abs(s2.values[-1]))

    common = []
    for i, lam1 in enumerate(s1.values):
        for j, lam2 in enumerate(s2.values):
            if (i, j) == (0, 0) or (abs(lam1) <= zero1 and abs(lam2) <= zero2):
                continue
            shared = subspace_intersection(s1.basis(i), s2.basis(j), tol)
            common.extend(_common_state(shared[:, k], (lam1, lam2)) for k in range(shared.shape[1]))
    common.sort(key=lambda c: -(c.payoffs[0] + c.payoffs[1]))

    top = subspace_intersection(s1.basis(0), s2.basis(0), tol)
    payoffs = (s1.values[0], s2.values[0])
    if top.shape[1]:
        vec = top[:, 0]
        return EquilibriumReport(
            "GES", vec, payoffs, factor_unitary_flags(vec), 0.0,
            margins=(0.0, 0.0), best_responses=payoffs, strategy_set="full",
            common_states=[_common_state(top[:, k], payoffs) for k in range(top.shape[1])] + common,
        )
    return EquilibriumReport(
        "none", None, payoffs, (False, False), math.nan, common_states=common
    )


def reduced_payoff(h, opponent, player: int) -> ReducedPayoff:
    """Payoff tensor of ``player`` contracted against a fixed opponent density.

    The result satisfies ``<s|H_R|s> = Tr((|s><s| ⊗ opponent) H)`` (player 1)
    and the mirrored identity for player 2.
    """
    sigma = validate_density(opponent, 4)
    h4 = np.asarray(h, dtype=np.complex128).reshape(4, 4, 4, 4)
    if player == 1:
        hr = np.einsum("akbl,lk->ab", h4, sigma)
    elif player == 2:
        hr = np.einsum("kalb,lk->ab", h4, sigma)
    else:
        raise RejectedInput(f"player must be 1 or 2, got {player!r}")
    return ReducedPayoff(0.5 * (hr + dagger(hr)), player, sigma)


def best_response_full(hr: ReducedPayoff) -> tuple[np.ndarray, float]:
    """Unit-norm maximiser of ``<s|H_R|s>`` over all strategy vectors."""
    dec = eig_hermitian(hr.matrix)
    return dec.eigenvectors[:, 0], float(dec.eigenvalues[0])


def best_response_iteration(h1, h2, start1, start2, max_iter: int = 100, tol: float = NE_TOL):
    """Alternate full-space best responses from ``(start1, start2)``.

    Returns ``(v1, v2, (E1, E2), steps)`` at the first profile where neither
    player's best-response payoff changes by more than ``tol``.
    """
    v1 = np.asarray(start1, dtype=np.complex128)
    v2 = np.asarray(start2, dtype=np.complex128)
    v1, v2 = v1 / np.linalg.norm(v1), v2 / np.linalg.norm(v2)
    last = (math.inf, math.inf)
    for step in range(1, max_iter + 1):
        v1, e1 = best_response_full(reduced_payoff(h1, pure_density(v2), 1))
        v2, e2 = best_response_full(reduced_payoff(h2, pure_density(v1), 2))
        e1 = payoff_of_profile(h1, v1, v2)
        if abs(e1 - last[0]) <= tol and abs(e2 - last[1]) <= tol:
            return v1, v2, (e1, e2), step
        last = (e1, e2)
    return v1, v2, last, max_iter


def payoff_of_profile(h, v1, v2) -> float:
    s = product_state(v1, v2)
    return _real(np.vdot(s, np.asarray(h) @ s))


def unitary_best_payoff(hr: ReducedPayoff) -> tuple[Euler, float]:
    """Exact maximum of ``<x|H_R|x>`` over all unitary strategies.

    Up to a global phase a unitary has coefficients ``x = PHASES * c`` with
    ``c`` a real unit 4-vector, so the maximum is the top eigenvalue of the
    real symmetric matrix ``Re(PHASES^* H_R PHASES)``.
    """
    d = _SU2_PHASES
    m = np.real(np.conj(d)[:, None] * hr.matrix * d[None, :])
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    c = vecs[:, -1]
    return Euler(*euler_angles(reconstruct(d * c))), float(vals[-1])


def _closed_form_diag(scale_diag, own_angle, other_angle, player: int):
    """Payoff for diagonal scales and ``rho0 = |UU><UU|``; angles broadcast."""
    a, b, c, d = (float(x.real) for x in scale_diag)
    co, so = np.cos(other_angle / 2) ** 2, np.sin(other_angle / 2) ** 2
    cs, ss = np.cos(own_angle / 2) ** 2, np.sin(own_angle / 2) ** 2
    if player == 1:
        return (c * co + d * so) * ss + (a * co + b * so) * cs
    return (b * co + d * so) * ss + (a * co + c * so) * cs


def closed_form_payoff(params1: UnitaryParams, params2: UnitaryParams, rstp, player: int) -> float:
    """Closed-form Prisoner's Dilemma payoff of a unitary product profile.

    Depends only on the mixing angles (``theta`` or ``gamma``) of the two
    strategies: ``(t c^2 + p s^2) sin^2(a_i/2) + (r c^2 + s s^2) cos^2(a_i/2)``
    where ``c, s`` are cosine and sine of the opponent's half angle.
    """
    r, s, t, p = rstp
    angles = (params1.mixing_angle, params2.mixing_angle)
    if player not in (1, 2):
        raise RejectedInput(f"player must be 1 or 2, got {player!r}")
    own, other = angles[player - 1], angles[2 - player]
    return float(closed_form_angles(own, other, (r, s, t, p)))


def closed_form_angles(own, other, rstp):
    """Vectorised closed form in terms of raw mixing angles."""
    r, s, t, p = rstp
    co, so = np.cos(np.asarray(other) / 2) ** 2, np.sin(np.asarray(other) / 2) ** 2
    return (t * co + p * so) * np.sin(np.asarray(own) / 2) ** 2 + (r * co + s * so) * np.cos(np.asarray(own) / 2) ** 2


def _golden_max(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def euler_grid(grid: int):
    """Grid over the three-angle family, ordered by (gamma, alpha, beta) ascending."""
    gammas = np.linspace(0.0, np.pi, grid)
    ab = np.linspace(-np.pi, np.pi, grid, endpoint=False)
    g, a, b = np.meshgrid(gammas, ab, ab, indexing="ij")
    params = np.stack([a.ravel(), b.ravel(), g.ravel()], axis=1)
    spacing = {"gamma": float(np.pi / (grid - 1)), "alpha": float(2 * np.pi / grid), "beta": float(2 * np.pi / grid)}
    return params, spacing


def _euler_coefficients_batch(params: np.ndarray) -> np.ndarray:
    a, b, g = params[:, 0], params[:, 1], params[:, 2]
    cg, sg = np.cos(g / 2), np.sin(g / 2)
    plus, minus = (a + b) / 2, (a - b) / 2
    return np.stack(
        [cg * np.cos(plus), -1j * sg * np.sin(minus), -1j * cg * np.sin(plus), -1j * sg * np.cos(minus)],
        axis=1,
    )


def best_response_unitary(
    g: GameDefinition,
    opponent: UnitaryParams,
    player: int,
    grid: int = 16,
    tol: float = NE_TOL,
) -> tuple[Euler, float]:
    """Best unitary reply of ``player`` to a fixed unitary opponent.

    For diagonal-scale games started from ``|UU>`` the payoff depends only on
    the mixing angle and the argmax is exact (gamma in {0, pi}). Otherwise a
    grid over ``(alpha, beta, gamma)`` is refined by golden-section search on
    gamma. Ties go to the smallest gamma, then alpha, then beta.
    """
    if grid < 8:
        raise RejectedInput("grid resolution must be at least 8 points per angle")
    if g.is_diagonal_product_game:
        diag = np.diag(g.scale(player))
        other = opponent.mixing_angle
        at_pi = float(_closed_form_diag(diag, np.pi, other, player))
        at_zero = float(_closed_form_diag(diag, 0.0, other, player))
        gamma = np.pi if at_pi > at_zero + tol else 0.0
        return Euler(-np.pi, -np.pi, gamma), max(at_pi, at_zero)

    hr = reduced_payoff(g.tensor(player), pure_density(expand(opponent.operator())), player)
    params, _ = euler_grid(grid)
    x = _euler_coefficients_batch(params)
    vals = np.real(np.einsum("ia,ab,ib->i", x.conj(), hr.matrix, x))
    best = int(np.flatnonzero(vals >= vals.max() - tol)[0])
    alpha, beta, gamma = params[best]
    step = np.pi / (grid - 1)

    def f(gm):
        xv = euler_coefficients(alpha, beta, gm)
        return float(np.real(np.vdot(xv, hr.matrix @ xv)))

    gm, val = _golden_max(f, max(0.0, gamma - step), min(np.pi, gamma + step))
    if val <= vals[best] + tol:
        gm, val = gamma, float(vals[best])
    return Euler(float(alpha), float(beta), float(gm)), val


def density_unitary_flag(rho4, tol: float = 1e-8) -> bool:
    """True when every eigen-component of a single-player density is a unitary operator."""
    vals, vecs = np.linalg.eigh(np.asarray(rho4))
    return all(
        is_unitary(reconstruct(vecs[:, k] / np.linalg.norm(vecs[:, k])), tol)
        for k in range(len(vals))
        if vals[k] > tol
    )


def _best_deviation(hr: ReducedPayoff, strategy_set: str) -> float:
    if strategy_set == "full":
        return best_response_full(hr)[1]
    if strategy_set == "unitary":
        return unitary_best_payoff(hr)[1]
    # payoff is linear in the mixture, so a pure classical strategy is optimal
    return float(max(hr.matrix[0, 0].real, hr.matrix[1, 1].real))


def _probe(hr: ReducedPayoff, strategy_set: str, samples: int, rng) -> float:
    """Largest payoff among ``samples`` random deviations of the given kind."""
    if strategy_set == "full":
        x = rng.normal(size=(samples, 4)) + 1j * rng.normal(size=(samples, 4))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
    elif strategy_set == "unitary":
        c = rng.normal(size=(samples, 4))
        x = _SU2_PHASES * (c / np.linalg.norm(c, axis=1, keepdims=True))
    else:
        w = rng.uniform(size=samples)
        return float(np.max(w * hr.matrix[0, 0].real + (1 - w) * hr.matrix[1, 1].real))
    return float(np.max(np.real(np.einsum("ia,ab,ib->i", x.conj(), hr.matrix, x))))


def verify_ne(
    g: GameDefinition,
    rho,
    strategy_set: str = "full",
    tol: float = NE_TOL,
    h1=None,
    h2=None,
    samples: int = 0,
    seed: int | None = 0,
) -> EquilibriumReport:
    """Check a 16x16 strategy density against unilateral deviations.

    For each player the best payoff attainable against the opponent's
    marginal (the other player's reduced density) is compared with the
    player's payoff in ``rho``. Deviations range over unit-norm strategy
    vectors (``full``), unitary operators (``unitary``) or mixtures of
    ``Nc``/``Fc`` (``classical``); the unitary maximum is computed exactly.

    ``samples`` random deviations are additionally probed as a self-check of
    the computed maximum.
    """
    if strategy_set not in STRATEGY_SETS:
        raise RejectedInput(f"strategy_set must be one of {STRATEGY_SETS}")
    rho = validate_density(rho, 16)
    hs = (g.tensor(1) if h1 is None else np.asarray(h1), g.tensor(2) if h2 is None else np.asarray(h2))
    rng = np.random.default_rng(seed)

    payoffs, best, margins = [], [], []
    for player, h in ((1, hs[0]), (2, hs[1])):
        e = _real(np.trace(rho @ h))
        hr = reduced_payoff(h, marginal(rho, 3 - player), player)
        b = _best_deviation(hr, strategy_set)
        if samples and _probe(hr, strategy_set, samples, rng) > b + max(tol, 1e-9 * abs(b)):
            raise NumericalConsistencyError("a sampled deviation beat the computed best response")
        payoffs.append(e)
        best.append(b)
        margins.append(b - e)

    flags = tuple(density_unitary_flag(marginal(rho, p)) for p in (1, 2))
    margin = max(margins)
    if margin > tol:
        kind = "none"
    elif strategy_set == "classical":
        kind = "classical-NE"
    elif strategy_set == "unitary" or all(flags):
        kind = "unitary-NE"
    else:
        kind = "non-unitary-candidate"
    return EquilibriumReport(
        kind, rho, tuple(payoffs), flags, float(margin),
        margins=tuple(margins), best_responses=tuple(best), strategy_set=strategy_set,
    )


def _tensor_for_pairs(h) -> np.ndarray:
    # Ht[(a,b),(c,d)] = H[(a,c),(b,d)] so that E = A1 @ Ht @ A2.T
    return np.asarray(h).reshape(4, 4, 4, 4).transpose(0, 2, 1, 3).reshape(16, 16)


def _profile_payoffs(ht, a, rows) -> np.ndarray:
    return np.real(a[rows] @ ht @ a.T)


def ne_family_scan(
    g: GameDefinition,
    grid: int = 16,
    tol: float = NE_TOL,
    strategy_set: str = "unitary",
    chunk: int = 512,
) -> list[EquilibriumReport]:
    """All grid product profiles with no profitable on-grid deviation.

    ``unitary`` scans the three-angle family (``grid`` points per angle,
    gamma in [0, pi] inclusive, alpha and beta over [-pi, pi)); ``classical``
    scans ``Nc``/``Fc`` mixtures with ``p_nc`` on ``grid`` points in [0, 1].
    Each report carries the grid spacing its certificate refers to.
    """
    if grid < 2:
        raise RejectedInput("grid resolution must be at least 2")
    if strategy_set == "unitary":
        params, spacing = euler_grid(grid)
        x = _euler_coefficients_batch(params)
        a = (x.conj()[:, :, None] * x[:, None, :]).reshape(-1, 16)
        labels = [Euler(*map(float, row)) for row in params]
        kind = "unitary-NE"
    elif strategy_set == "classical":
        probs = np.linspace(0.0, 1.0, grid)
        dens = np.array([classical_mixture(q) for q in probs])
        a = np.transpose(dens, (0, 2, 1)).reshape(-1, 16)
        labels = [{"p_nc": float(q), "p_fc": float(1 - q)} for q in probs]
        spacing = {"p_nc": float(1.0 / (grid - 1))}
        kind = "classical-NE"
    else:
        raise RejectedInput("ne_family_scan supports the unitary and classical strategy sets")

    ht1, ht2 = _tensor_for_pairs(g.tensor(1)), _tensor_for_pairs(g.tensor(2))
    n = a.shape[0]
    # E1[i, j]: player 1 plays i, player 2 plays j. Player 1 deviates along columns' fixed j.
    best1 = np.full(n, -np.inf)
    best2 = np.empty(n)
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        best1 = np.maximum(best1, _profile_payoffs(ht1, a, rows).max(axis=0))
        best2[rows] = _profile_payoffs(ht2, a, rows).max(axis=1)

    reports = []
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        e1 = _profile_payoffs(ht1, a, rows)
        e2 = _profile_payoffs(ht2, a, rows)
        m1 = best1[None, :] - e1
        m2 = best2[rows, None] - e2
        margin = np.maximum(m1, m2)
        for i, j in zip(*np.nonzero(margin <= tol)):
            gi = start + int(i)
            if strategy_set == "unitary":
                state = product_state(x[gi], x[j])
            else:
                state = np.kron(dens[gi], dens[j])
            reports.append(
                EquilibriumReport(
                    kind, state, (float(e1[i, j]), float(e2[i, j])), (True, True),
                    float(margin[i, j]), margins=(float(m1[i, j]), float(m2[i, j])),
                    best_responses=(float(best1[j]), float(best2[gi])), strategy_set=strategy_set,
                    profile=(labels[gi], labels[j]), grid_spacing=spacing,
                )
            )
    return reports


__all__ = [
    "CommonEigenstate",
    "EquilibriumReport",
    "ReducedPayoff",
    "SpectrumReport",
    "ThetaPhi",
    "best_response_full",
    "best_response_iteration",
    "best_response_unitary",
    "closed_form_payoff",
    "ges_search",
    "ne_family_scan",
    "reduced_payoff",
    "spectrum",
    "unitary_best_payoff",
    "verify_ne",
]
