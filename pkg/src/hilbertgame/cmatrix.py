"""Dense complex-matrix kernel.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. The
helpers here add the shape/finiteness validation the rest of the package
relies on, plus a cyclic complex Jacobi eigensolver for Hermitian matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NotHermitianError, RejectedInput

EQ_TOL = 1e-10
HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_cmatrix(a, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Convert ``a`` to a finite 2-d complex array, validating along the way."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise RejectedInput(f"{name} must be a non-empty 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise RejectedInput(f"{name} has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise RejectedInput(f"{name} must be square, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_cmatrix(a, name="a")
    b = as_cmatrix(b, name="b")
    if a.shape[1] != b.shape[0]:
        raise RejectedInput(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def dagger(a) -> np.ndarray:
    """Conjugate transpose. Works on stacks of matrices (last two axes)."""
    return np.conj(np.swapaxes(np.asarray(a, dtype=np.complex128), -1, -2))


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``(a⊗b)[p*rb + q, r*cb + s] = a[p, r] * b[q, s]``."""
    return np.kron(as_cmatrix(a, name="a"), as_cmatrix(b, name="b"))


def trace(a) -> complex:
    a = as_cmatrix(a, name="a")
    if a.shape[0] != a.shape[1]:
        raise RejectedInput(f"trace of non-square matrix {a.shape}")
    return complex(np.trace(a))


def partial_trace(a, dims: tuple[int, int], which: int) -> np.ndarray:
    """Trace out subsystem ``which`` (0 or 1) of a bipartite operator.

    ``dims`` gives the factor dimensions ``(d0, d1)``; the result lives on the
    remaining factor.
    """
    a = as_cmatrix(a, square=True, name="a")
    d0, d1 = (int(d) for d in dims)
    if d0 <= 0 or d1 <= 0 or a.shape[0] != d0 * d1:
        raise RejectedInput(f"matrix of side {a.shape[0]} does not factor as {d0}x{d1}")
    t = a.reshape(d0, d1, d0, d1)
    if which == 0:
        return np.einsum("ijik->jk", t)
    if which == 1:
        return np.einsum("ijkj->ik", t)
    raise RejectedInput(f"subsystem index must be 0 or 1, got {which!r}")


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a, dtype=np.complex128)
    scale = max(np.linalg.norm(a), 1.0)
    return bool(np.linalg.norm(a - dagger(a)) <= tol * scale)


def canonical_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate ``v`` so its largest-modulus entry is real positive.

    Modulus ties (within ``tol`` relative) go to the lowest index.
    """
    v = np.asarray(v, dtype=np.complex128)
    mod = np.abs(v)
    top = mod.max()
    if top == 0.0:
        return v.copy()
    k = int(np.flatnonzero(mod >= top * (1.0 - tol))[0])
    return v * (np.conj(v[k]) / mod[k])


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order; ``eigenvectors[:, k]`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _jacobi_rotation(app: float, aqq: float, apq: complex):
    """2x2 unitary ``J`` with ``J^† [[app, apq], [conj(apq), aqq]] J`` diagonal."""
    mag = abs(apq)
    phase = apq / mag
    theta = (aqq - app) / (2.0 * mag)
    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    # diag(1, conj(phase)) makes the pair real symmetric, then a real rotation
    return np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=np.complex128)


def eig_hermitian(
    a,
    *,
    tol: float = JACOBI_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    hermitian_tol: float = HERMITIAN_TOL,
) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Parameters
    ----------
    a : array_like
        Square Hermitian matrix, ``||a - a^†||_F <= hermitian_tol * ||a||_F``.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm drops to
        ``tol * ||a||_F``.
    max_sweeps : int
        Raises :class:`ConvergenceError` if exceeded.

    Returns
    -------
    EigenDecomposition
        Eigenvalues sorted descending, eigenvectors phase-canonicalised.
    """
    a = as_cmatrix(a, square=True, name="a")
    norm = np.linalg.norm(a)
    if np.linalg.norm(a - dagger(a)) > hermitian_tol * norm:
        raise NotHermitianError("eig_hermitian requires a Hermitian matrix")
    n = a.shape[0]
    w = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=np.complex128)
    threshold = tol * norm
    # entries below this are treated as already annihilated
    skip = 1e-3 * threshold / n if n > 1 else 0.0

    offdiag = ~np.eye(n, dtype=bool)

    def off_norm(m):
        return np.linalg.norm(m[offdiag])

    sweeps = 0
    while off_norm(w) > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                if abs(apq) <= skip:
                    continue
                j = _jacobi_rotation(w[p, p].real, w[q, q].real, apq)
                idx = [p, q]
                w[:, idx] = w[:, idx] @ j
                w[idx, :] = dagger(j) @ w[idx, :]
                w[p, q] = w[q, p] = 0.0
                w[p, p] = w[p, p].real
                w[q, q] = w[q, q].real
                v[:, idx] = v[:, idx] @ j

    vals = np.real(np.diag(w)).copy()
    vecs = np.column_stack([canonical_phase(v[:, k]) for k in range(n)])
    lead = np.argmax(np.abs(vecs) >= np.abs(vecs).max(axis=0) * (1.0 - 1e-12), axis=0)
    # exact ties in value fall back to the index of the canonical component
    order = np.lexsort((lead, -vals))
    return EigenDecomposition(vals[order], vecs[:, order], sweeps)
