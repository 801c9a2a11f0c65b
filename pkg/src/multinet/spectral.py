"""Univariate centralities: eigencentrality and HITS hubs/authorities.

Both are power iterations started from the uniform vector ``1/sqrt(n)``.
HITS alternates ``h <- A a`` and ``a <- A^T h`` with Euclidean
normalization after every matrix application, so at convergence the hub
and authority vectors are the principal left and right singular vectors of
``A``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

#: Relative gap ``(l1 - l2) / l1`` between the two leading eigenvalues of
#: ``A^T A`` below which the HITS solution is reported as non-unique.
GAP_RTOL = 1e-8


@dataclass(frozen=True)
class CentralityResult:
    scores: np.ndarray
    eigenvalue: float
    iterations: int
    converged: bool
    residual: float


@dataclass(frozen=True)
class HitsResult:
    hubs: np.ndarray
    authorities: np.ndarray
    sigma: float
    iterations: int
    converged: bool
    gap_ok: bool


class Rank1SVD(NamedTuple):
    sigma: float
    u: np.ndarray
    v: np.ndarray


def _matrix(g) -> np.ndarray:
    a = getattr(g, "weights", g)
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    return a


def _normalize(x: np.ndarray) -> tuple[np.ndarray, float]:
    nrm = float(np.sqrt(x @ x))
    if nrm == 0.0:
        return x, 0.0
    return x / nrm, nrm


def sign_fix(x: np.ndarray) -> float:
    """Sign that makes the largest-magnitude entry of ``x`` positive."""
    if x.size == 0:
        return 1.0
    return -1.0 if x[np.argmax(np.abs(x))] < 0 else 1.0


def eigencentrality(g, tol: float = 1e-10, max_iter: int = 1000) -> CentralityResult:
    """Perron eigenvector of a symmetric nonnegative adjacency matrix.

    Iterates with ``A + c I`` where ``c`` is half the largest row sum.  The
    shift leaves eigenvectors unchanged but makes the Perron root strictly
    dominant in magnitude, which plain power iteration lacks on bipartite
    graphs (``-rho`` is then also an eigenvalue).

    Non-convergence is reported through ``converged=False``.
    """
    a = _matrix(g)
    if a.shape[0] != a.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if not np.array_equal(a, a.T):
        raise ValueError("eigencentrality needs a symmetric (undirected) matrix")
    if not np.any(a):
        raise ValueError("eigencentrality of an all-zero matrix is undefined")
    n = a.shape[0]
    shift = 0.5 * float(np.abs(a).sum(axis=1).max())
    bound = tol * float(np.linalg.norm(a))
    x = np.full(n, 1.0 / np.sqrt(n))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        y, _ = _normalize(a @ x + shift * x)
        step = float(np.linalg.norm(y - x))
        x = y
        if step <= tol:
            ax = a @ x
            if np.linalg.norm(ax - (x @ ax) * x) <= bound:
                converged = True
                break
    x = x * sign_fix(x)
    lam = float(x @ a @ x)
    residual = float(np.linalg.norm(a @ x - lam * x))
    return CentralityResult(x, lam, it, converged, residual)


def _alternating_power(a, v0, tol, max_iter):
    """Alternating ``u <- A v``, ``v <- A^T u`` with unit normalization.

    Converged once the fixed-point residual ``||A v - sigma u||`` is below
    ``tol * sigma`` and the remaining distance to the limit, extrapolated
    from the geometric decay ``r`` of successive steps as
    ``step / (1 - r)``, is below ``tol / 2``.  A bare ``step <= tol`` test
    would stop while the iterates are still several ``tol`` away whenever
    the singular-value ratio is close to one.
    """
    v = v0
    u = np.zeros(a.shape[0])
    sigma = 0.0
    converged = False
    it = 0
    prev_step = np.inf
    for it in range(1, max_iter + 1):
        u_new, _ = _normalize(a @ v)
        v_new, sigma = _normalize(a.T @ u_new)
        if sigma == 0.0:
            raise ValueError("start vector is annihilated by the matrix")
        step = max(np.linalg.norm(u_new - u), np.linalg.norm(v_new - v))
        u, v = u_new, v_new
        rate = min(step / prev_step, 0.999) if prev_step > 0 else 0.0
        prev_step = step
        if step / (1.0 - rate) <= 0.5 * tol and np.linalg.norm(a @ v - sigma * u) <= tol * sigma:
            converged = True
            break
    return sigma, u, v, it, converged


def hits(g, tol: float = 1e-10, max_iter: int = 1000) -> HitsResult:
    """Hub and authority scores of a nonnegative (possibly asymmetric) matrix.

    Parameters
    ----------
    g : LayerGraph or array_like
        Nonnegative square adjacency matrix, ``A[i, j]`` the arc ``i -> j``.
    tol : float
        Stop once both vectors are estimated to lie within ``tol``
        (Euclidean) of their limits; see :func:`_alternating_power`.
    max_iter : int
        Sweep budget; running out yields ``converged=False``.

    Returns
    -------
    HitsResult
        Unit-norm hubs and authorities, the associated singular value
        ``sigma`` and ``gap_ok``, which is false when the two leading
        eigenvalues of ``A^T A`` are within ``GAP_RTOL`` of each other and
        the scores are therefore not unique.
    """
    a = _matrix(g)
    if a.shape[0] != a.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if np.any(a < 0):
        raise ValueError("HITS needs a nonnegative matrix")
    if not np.any(a):
        raise ValueError("HITS of an all-zero matrix is undefined")
    n = a.shape[0]
    sigma, h, auth, it, converged = _alternating_power(a, np.full(n, 1.0 / np.sqrt(n)), tol, max_iter)
    return HitsResult(h, auth, sigma, it, converged, spectral_gap_ok(a))


def spectral_gap_ok(a, rtol: float = GAP_RTOL) -> bool:
    """Whether ``lambda_1(A^T A)`` strictly exceeds ``lambda_2`` by ``rtol`` relative."""
    s = scipy.linalg.svdvals(_matrix(a))
    if s.size < 2:
        return bool(s.size == 1 and s[0] > 0)
    l1, l2 = s[0] ** 2, s[1] ** 2
    return bool(l1 > 0 and (l1 - l2) > rtol * l1)


def rank1_svd(a, tol: float = 1e-12, max_iter: int = 5000) -> Rank1SVD:
    """Best rank-1 approximation ``sigma * u v^T`` of a real matrix.

    Alternating power iteration started from the row of largest norm, which
    is never annihilated by ``A``.  Signs follow :func:`sign_fix` on ``u``.
    """
    a = _matrix(a)
    if not np.any(a):
        raise ValueError("rank-1 approximation of a zero matrix is undefined")
    row = int(np.argmax(np.einsum("ij,ij->i", a, a)))
    v0, _ = _normalize(a[row].copy())
    sigma, u, v, _, _ = _alternating_power(a, v0, tol, max_iter)
    s = sign_fix(u)
    return Rank1SVD(sigma, u * s, v * s)
