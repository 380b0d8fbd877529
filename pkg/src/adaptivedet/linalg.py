"""Complex Hermitian linear-algebra kernel.

Whitening, projection, and eigen primitives that every detector statistic
is built from.  All functions accept stacked inputs (leading batch axes)
wherever the underlying LAPACK drivers do.
"""

import numpy as np

from .errors import DefinitenessError, RankError

# Reciprocal condition numbers below this are treated as rank deficiency.
RCOND_LIMIT = 1e-12


def _as_complex(a) -> np.ndarray:
    return np.asarray(a, dtype=np.complex128)


def check_hermitian_pd(S, rtol: float = 1e-12) -> np.ndarray:
    """Validate that ``S`` is Hermitian positive definite.

    Returns the symmetrized ``(S + S^H)/2`` so downstream eigensolvers see an
    exactly Hermitian matrix.  Raises :class:`DefinitenessError` if ``S``
    deviates from Hermitian symmetry by more than ``rtol`` (relative) or has
    a non-positive eigenvalue.
    """
    S = _as_complex(S)
    scale = np.linalg.norm(S, axis=(-2, -1), keepdims=True)
    asym = np.linalg.norm(S - np.conj(np.swapaxes(S, -2, -1)), axis=(-2, -1), keepdims=True)
    if np.any(asym > rtol * np.maximum(scale, np.finfo(float).tiny)):
        raise DefinitenessError("matrix is not Hermitian to the required tolerance")
    S = 0.5 * (S + np.conj(np.swapaxes(S, -2, -1)))
    w = np.linalg.eigvalsh(S)
    if np.any(w[..., 0] <= 0):
        raise DefinitenessError("matrix has a non-positive eigenvalue")
    return S


def inv_sqrt(S) -> np.ndarray:
    """Hermitian inverse square root ``T`` with ``T S T = I``.

    Computed from the eigendecomposition of ``S`` so the result is itself
    Hermitian positive definite and commutes with ``S``.
    """
    S = check_hermitian_pd(S)
    w, V = np.linalg.eigh(S)
    T = (V * (1.0 / np.sqrt(w))[..., None, :]) @ np.conj(np.swapaxes(V, -2, -1))
    return 0.5 * (T + np.conj(np.swapaxes(T, -2, -1)))


def herm_sqrt(S) -> np.ndarray:
    """Hermitian square root ``A`` with ``A A = S`` (eigendecomposition based)."""
    S = check_hermitian_pd(S)
    w, V = np.linalg.eigh(S)
    A = (V * np.sqrt(w)[..., None, :]) @ np.conj(np.swapaxes(V, -2, -1))
    return 0.5 * (A + np.conj(np.swapaxes(A, -2, -1)))


def orthonormal_basis(A) -> np.ndarray:
    """Orthonormal basis ``Q`` for the column span of a full-column-rank ``A``.

    Raises :class:`RankError` when the columns are numerically dependent
    (reciprocal condition number below ``RCOND_LIMIT``).
    """
    A = _as_complex(A)
    if A.shape[-1] == 0:
        return A
    if A.shape[-1] > A.shape[-2]:
        raise RankError("more columns than rows: cannot have full column rank")
    Q, R = np.linalg.qr(A)
    d = np.abs(np.diagonal(R, axis1=-2, axis2=-1))
    if np.any(d.min(axis=-1) <= RCOND_LIMIT * d.max(axis=-1)):
        raise RankError("matrix is numerically rank deficient")
    return Q


def ortho_projector(A) -> np.ndarray:
    """Orthogonal projector onto the column span of ``A``: ``A (A^H A)^-1 A^H``."""
    A = _as_complex(A)
    if A.shape[-1] == 0:
        n = A.shape[-2]
        return np.zeros(A.shape[:-2] + (n, n), dtype=np.complex128)
    Q = orthonormal_basis(A)
    return Q @ np.conj(np.swapaxes(Q, -2, -1))


def perp_projector(A) -> np.ndarray:
    """Projector onto the orthogonal complement of the column span of ``A``."""
    A = _as_complex(A)
    n = A.shape[-2]
    return np.eye(n, dtype=np.complex128) - ortho_projector(A)


def oblique_projector(H, J) -> np.ndarray:
    """Oblique projector onto span(H) along span(J).

    ``P H = H`` and ``P J = 0``; requires ``[H J]`` to have full column rank.
    """
    H = _as_complex(H)
    J = _as_complex(J)
    if J.shape[-1] == 0:
        return ortho_projector(H)
    orthonormal_basis(np.concatenate([H, J], axis=-1))  # rank check on [H J]
    PJp = perp_projector(J)
    G = np.conj(np.swapaxes(H, -2, -1)) @ PJp @ H
    if np.linalg.cond(G) > 1.0 / RCOND_LIMIT:
        raise RankError("signal and interference subspaces overlap")
    return H @ np.linalg.solve(G, np.conj(np.swapaxes(H, -2, -1)) @ PJp)


def max_eig_pair(A, B=None):
    """Largest generalized eigenpair of ``A v = lambda B v``.

    ``A`` must be Hermitian positive semidefinite and ``B`` Hermitian positive
    definite (``B = I`` when omitted).  Solved by reduction with
    ``B^{-1/2}``, keeping a single Hermitian eigensolver.

    Returns
    -------
    lam : float
        The largest eigenvalue.
    v : ndarray
        Unit-norm eigenvector satisfying ``A v = lam B v``.
    """
    A = _as_complex(A)
    if B is None:
        w, V = np.linalg.eigh(0.5 * (A + A.conj().T))
        return float(w[-1]), V[:, -1]
    B = _as_complex(B)
    if A.shape != B.shape:
        raise ValueError("A and B must have identical shapes")
    T = inv_sqrt(B)
    M = T @ A @ T
    w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
    v = T @ V[:, -1]
    v = v / np.linalg.norm(v)
    return float(w[-1]), v
