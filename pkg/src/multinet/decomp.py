"""Tensor decompositions of multilayer adjacency tensors.

* :func:`tophits_rank1` - alternating power iteration for the dominant
  hub/authority/topic triplet.
* :func:`cp_als` - rank-``R`` CP/PARAFAC model by alternating least squares.
* :func:`tucker` - Tucker model by higher-order orthogonal iteration.
* :func:`corcondia` - core consistency of a CP model, in percent.

Fit is ``1 - ||X - Xhat||_F / ||X||_F`` throughout.
"""
from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .spectral import sign_fix
from .tensor import (
    Tensor3,
    as_array,
    contract1,
    contract2,
    contract12,
    khatri_rao,
    mode_unfold,
    multi_mode_product,
)

log = logging.getLogger(__name__)

#: Condition number of a normal-equation Gram matrix above which a ridge
#: of ``RIDGE * trace`` is added before solving.
COND_LIMIT = 1e12
RIDGE = 1e-12


def _unit(x):
    nrm = float(np.sqrt(x @ x))
    return (x / nrm if nrm > 0 else x), nrm


def _nonzero_tensor(t) -> np.ndarray:
    x = as_array(t)
    if not np.any(x):
        raise ValueError("decomposition of an all-zero tensor is undefined")
    return x


def fit_of(x: np.ndarray, xhat: np.ndarray) -> float:
    return 1.0 - float(np.linalg.norm(x - xhat)) / float(np.linalg.norm(x))


@dataclass(frozen=True, eq=False)
class Triplet:
    """Hub, authority and topic vectors of one CP factor.

    ``topics`` is the raw unit-L2 column; ``topics_normalized`` divides it by
    the sum of absolute values, which gives the layer shares reported in
    tables.  ``factor_index`` is 1-based.
    """

    hubs: np.ndarray
    authorities: np.ndarray
    topics: np.ndarray
    weight: float
    factor_index: int = 1
    converged: bool = True
    iterations: int = 0

    @property
    def topics_normalized(self) -> np.ndarray:
        s = float(np.abs(self.topics).sum())
        return self.topics / s if s > 0 else self.topics


def tophits_rank1(t, tol: float = 1e-10, max_iter: int = 1000) -> Triplet:
    """Dominant TOPHITS triplet by alternating power iteration.

    Each sweep updates ``h <- A x2 a x3 t``, ``a <- A x1 h x3 t`` and
    ``t <- A x1 h x2 a``, normalizing each to unit length right after its
    update.  Starts from uniform ``a`` and ``t``.  The weight is the norm of
    the last unnormalized topic update, i.e. ``A x1 h x2 a x3 t``.
    """
    x = _nonzero_tensor(t)
    I, J, K = x.shape
    h = np.zeros(I)
    a = np.full(J, 1.0 / np.sqrt(J))
    tv = np.full(K, 1.0 / np.sqrt(K))
    weight = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        h_new, _ = _unit(contract2(x, a, tv))
        a_new, _ = _unit(contract1(x, h_new, tv))
        t_new, weight = _unit(contract12(x, h_new, a_new))
        if weight == 0.0:
            raise ValueError("start vectors are annihilated by the tensor")
        step = max(np.linalg.norm(h_new - h), np.linalg.norm(a_new - a), np.linalg.norm(t_new - tv))
        h, a, tv = h_new, a_new, t_new
        if step <= tol:
            converged = True
            break
    s = sign_fix(h)
    h, a = h * s, a * s
    s = sign_fix(a)
    a, tv = a * s, tv * s
    return Triplet(h, a, tv, weight, 1, converged, it)


@dataclass(frozen=True, eq=False)
class CpModel:
    """Rank-``R`` CP model ``sum_r lambdas[r] U[:, r] o V[:, r] o W[:, r]``.

    Columns are unit norm, ``lambdas`` are positive and sorted descending.
    ``U`` holds hub factors, ``V`` authority factors and ``W`` topic
    (layer) factors.
    """

    lambdas: np.ndarray
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    fit: float
    iterations: int = 0
    converged: bool = True
    settings: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.lambdas)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.U.shape[0], self.V.shape[0], self.W.shape[0])

    def full(self) -> np.ndarray:
        return np.einsum("r,ir,jr,kr->ijk", self.lambdas, self.U, self.V, self.W, optimize=True)

    def to_json(self) -> str:
        return json.dumps(
            {
                "rank": self.rank,
                "lambdas": self.lambdas.tolist(),
                "U": self.U.tolist(),
                "V": self.V.tolist(),
                "W": self.W.tolist(),
                "fit": self.fit,
                "iterations": self.iterations,
                "converged": self.converged,
                "settings": self.settings,
                "diagnostics": self.diagnostics,
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "CpModel":
        d = json.loads(text)
        R = int(d["rank"])
        mats = [np.array(d[k], dtype=float).reshape(-1, R) for k in ("U", "V", "W")]
        return cls(
            np.array(d["lambdas"], dtype=float),
            *mats,
            fit=float(d["fit"]),
            iterations=int(d.get("iterations", 0)),
            converged=bool(d.get("converged", True)),
            settings=d.get("settings", {}),
            diagnostics=d.get("diagnostics", {}),
        )


def _solve_gram(rhs: np.ndarray, gram: np.ndarray, diag: dict) -> np.ndarray:
    """Solve ``X gram = rhs`` for X (gram symmetric PSD)."""
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        gram = gram + RIDGE * max(np.trace(gram), np.finfo(float).tiny) * np.eye(len(gram))
        diag["ridge_steps"] = diag.get("ridge_steps", 0) + 1
    return np.linalg.solve(gram, rhs.T).T


def _normalize_columns(mats, lambdas):
    out = []
    for m in mats:
        norms = np.linalg.norm(m, axis=0)
        safe = np.where(norms > 0, norms, 1.0)
        out.append(m / safe)
        lambdas = lambdas * norms
    return out, lambdas


def _canonical(lambdas, U, V, W):
    """Sort by descending weight and fix signs (U, then V, column max-abs positive)."""
    order = np.argsort(-lambdas, kind="stable")
    lambdas, U, V, W = lambdas[order], U[:, order].copy(), V[:, order].copy(), W[:, order].copy()
    for r in range(len(lambdas)):
        s = sign_fix(U[:, r])
        U[:, r] *= s
        V[:, r] *= s
        s = sign_fix(V[:, r])
        V[:, r] *= s
        W[:, r] *= s
    return lambdas, U, V, W


def _svd_init(x, rank, rng):
    mats = []
    for mode in (1, 2, 3):
        unf = mode_unfold(x, mode)
        left, _, _ = np.linalg.svd(unf, full_matrices=False)
        k = min(rank, left.shape[1])
        cols = [left[:, :k] * np.array([sign_fix(left[:, c]) for c in range(k)])]
        if rank > k:
            cols.append(rng.random((unf.shape[0], rank - k)))
        mats.append(np.hstack(cols))
    return mats


def _random_init(x, rank, rng):
    return [rng.random((n, rank)) for n in x.shape]


def _as_factors(init, rank, x, rng):
    """Factor matrices from a previous model, padded with fresh columns."""
    if isinstance(init, CpModel):
        mats = [init.U * init.lambdas, init.V, init.W]
    else:
        mats = [np.asarray(m, dtype=float) for m in init]
    out = []
    for n, m in zip(x.shape, mats):
        if m.shape[0] != n:
            raise ValueError("initial factor rows do not match the tensor")
        if m.shape[1] > rank:
            m = m[:, :rank]
        if m.shape[1] < rank:
            m = np.hstack([m, rng.random((n, rank - m.shape[1]))])
        out.append(m.copy())
    return out


def _als_run(x, factors, tol, max_iter):
    A, B, C = factors
    X1, X2, X3 = (mode_unfold(x, m) for m in (1, 2, 3))
    norm_x = float(np.linalg.norm(x))
    diag: dict = {}
    fit_prev = -np.inf
    fit = -np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        A = _solve_gram(X1 @ khatri_rao(C, B), (B.T @ B) * (C.T @ C), diag)
        B = _solve_gram(X2 @ khatri_rao(C, A), (A.T @ A) * (C.T @ C), diag)
        C = _solve_gram(X3 @ khatri_rao(B, A), (A.T @ A) * (B.T @ B), diag)
        # C absorbs the scale; X_(3) ~ C (B kr A)^T
        resid = X3 - C @ khatri_rao(B, A).T
        fit = 1.0 - float(np.linalg.norm(resid)) / norm_x
        if abs(fit - fit_prev) <= tol:
            converged = True
            break
        fit_prev = fit
    return [A, B, C], it, converged, diag


def cp_als(
    t,
    rank: int,
    tol: float = 1e-10,
    max_iter: int = 1000,
    restarts: int = 1,
    seed: int | None = 0,
    init=None,
) -> CpModel:
    """Rank-``R`` CP decomposition by alternating least squares.

    Parameters
    ----------
    t : Tensor3 or array_like
        Nonzero ``I x J x K`` tensor.
    rank : int
        Number of components ``R >= 1``.
    tol : float
        Stop a run when the fit changes by at most ``tol`` between sweeps.
    max_iter : int
        Sweep budget per run.
    restarts : int
        Number of runs.  Run 0 starts from the leading left singular vectors
        of each unfolding (padded with random columns when ``R`` exceeds a
        mode's extent) or from ``init`` when given; further runs start from
        uniform random factors.  The best fit wins.
    seed : int or None
        Seed of the random generator used for all random starts.
    init : CpModel or sequence of three matrices, optional
        Warm start.  Columns missing relative to ``rank`` are filled with
        random values, so a rank-``R`` model seeds a rank ``R+1`` run.

    Returns
    -------
    CpModel
    """
    x = _nonzero_tensor(t)
    rank = int(rank)
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if rank > min(x.shape):
        warnings.warn(
            f"rank {rank} exceeds the smallest tensor extent {min(x.shape)}; "
            "the CP model is not unique",
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    best = None
    for run in range(restarts):
        if run == 0:
            start = _as_factors(init, rank, x, rng) if init is not None else _svd_init(x, rank, rng)
        else:
            start = _random_init(x, rank, rng)
        factors, it, converged, diag = _als_run(x, start, tol, max_iter)
        (U, V, W), lambdas = _normalize_columns(factors, np.ones(rank))
        lambdas, U, V, W = _canonical(lambdas, U, V, W)
        fit = fit_of(x, np.einsum("r,ir,jr,kr->ijk", lambdas, U, V, W, optimize=True))
        log.debug("cp_als rank=%d run=%d sweeps=%d fit=%.10f", rank, run, it, fit)
        if best is None or fit > best[0]:
            best = (fit, lambdas, U, V, W, it, converged, dict(diag, run=run))
    fit, lambdas, U, V, W, it, converged, diag = best
    settings = {"rank": rank, "tol": tol, "max_iter": max_iter, "restarts": restarts, "seed": seed}
    return CpModel(lambdas, U, V, W, fit, it, converged, settings, diag)


def triplets(m: CpModel) -> list[Triplet]:
    """One triplet per factor in descending weight order; index 1 is dominant."""
    if not m.converged:
        warnings.warn("triplets taken from a CP model that did not converge", stacklevel=2)
    order = np.argsort(-m.lambdas, kind="stable")
    return [
        Triplet(m.U[:, r], m.V[:, r], m.W[:, r], float(m.lambdas[r]), pos + 1, m.converged, m.iterations)
        for pos, r in enumerate(order)
    ]


class Ranked(NamedTuple):
    index: int
    score: float


def top_k(scores, k: int) -> list[Ranked]:
    """Indices of the ``k`` largest scores; ties go to the lower index."""
    scores = np.asarray(scores, dtype=float)
    order = np.lexsort((np.arange(scores.size), -scores))
    return [Ranked(int(i), float(scores[i])) for i in order[: max(int(k), 0)]]


def subgroup(m: CpModel, r: int, k: int = 5) -> tuple[list[Ranked], list[Ranked]]:
    """Top-``k`` hubs and authorities of factor ``r`` (1-based)."""
    if not 1 <= r <= m.rank:
        raise IndexError(f"factor index {r} exceeds rank {m.rank}")
    trip = triplets(m)[r - 1]
    return top_k(trip.hubs, k), top_k(trip.authorities, k)


# ---------------------------------------------------------------------------
# Tucker
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TuckerModel:
    core: Tensor3
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    fit: float
    iterations: int = 0
    converged: bool = True

    def full(self) -> np.ndarray:
        return multi_mode_product(self.core, self.U, self.V, self.W).data


def _leading(mat, k):
    left, _, _ = np.linalg.svd(mat, full_matrices=False)
    return left[:, :k]


def tucker(t, dims: Sequence[int], tol: float = 1e-12, max_iter: int = 500) -> TuckerModel:
    """Tucker model by higher-order orthogonal iteration (HOOI).

    Factors start from the leading left singular vectors of each unfolding
    (the truncated HOSVD) and are refined until the core norm, which HOOI
    increases monotonically, changes by at most ``tol`` relative.
    """
    x = as_array(t)
    P, Q, R = (int(d) for d in dims)
    I, J, K = x.shape
    if not (1 <= P <= I and 1 <= Q <= J and 1 <= R <= K):
        raise ValueError(f"Tucker dims {(P, Q, R)} invalid for a tensor of shape {x.shape}")
    U, V, W = (_leading(mode_unfold(x, m), d) for m, d in ((1, P), (2, Q), (3, R)))
    norm_prev = -np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        U = _leading(mode_unfold(np.einsum("ijk,jq,kr->iqr", x, V, W), 1), P)
        V = _leading(mode_unfold(np.einsum("ijk,ip,kr->pjr", x, U, W), 2), Q)
        W = _leading(mode_unfold(np.einsum("ijk,ip,jq->pqk", x, U, V), 3), R)
        core = np.einsum("ijk,ip,jq,kr->pqr", x, U, V, W, optimize=True)
        norm = float(np.linalg.norm(core))
        if abs(norm - norm_prev) <= tol * max(norm, 1.0):
            converged = True
            break
        norm_prev = norm
    core = np.einsum("ijk,ip,jq,kr->pqr", x, U, V, W, optimize=True)
    xhat = np.einsum("pqr,ip,jq,kr->ijk", core, U, V, W, optimize=True)
    fit = fit_of(x, xhat) if np.any(x) else 1.0
    return TuckerModel(Tensor3(core), U, V, W, fit, it, converged)


# ---------------------------------------------------------------------------
# Core consistency
# ---------------------------------------------------------------------------


def least_squares_core(t, U, V, W) -> np.ndarray:
    """Least-squares Tucker core of ``t`` for fixed factor matrices."""
    x = as_array(t)
    for name, m in (("U", U), ("V", V), ("W", W)):
        if np.linalg.matrix_rank(m) < m.shape[1]:
            raise ValueError(
                f"factor {name} of shape {m.shape} is column-rank deficient; "
                "the core system is underdetermined"
            )
    return np.einsum(
        "ijk,pi,qj,rk->pqr", x, np.linalg.pinv(U), np.linalg.pinv(V), np.linalg.pinv(W), optimize=True
    )


def corcondia(t, m: CpModel) -> float:
    """Core consistency diagnostic of a CP model, in percent.

    Computes the least-squares core ``G`` of ``t`` given the model factors
    (weights absorbed into ``U``) and returns
    ``100 * (1 - sum((G - I)^2) / R)`` with ``I`` the superdiagonal identity.
    100 means the CP structure is fully consistent; values can be negative.
    Raises ``ValueError`` when ``R`` exceeds an extent of the tensor, as the
    core is then not identifiable.
    """
    x = as_array(t)
    R = m.rank
    if R > min(x.shape):
        raise ValueError(f"rank {R} exceeds the smallest tensor extent {min(x.shape)}; core is underdetermined")
    g = least_squares_core(x, m.U * m.lambdas, m.V, m.W)
    ident = np.zeros((R, R, R))
    ident[np.arange(R), np.arange(R), np.arange(R)] = 1.0
    return float(100.0 * (1.0 - np.sum((g - ident) ** 2) / R))


def factor_stability(prev: CpModel, cur: CpModel) -> float:
    """Mean cosine between ``prev``'s hub columns and their best greedy match in ``cur``."""
    sim = np.abs(prev.U.T @ cur.U)
    total = 0.0
    used: set[int] = set()
    for r in np.argsort(-prev.lambdas, kind="stable"):
        cand = [(sim[r, c], c) for c in range(sim.shape[1]) if c not in used]
        if not cand:
            break
        s, c = max(cand)
        used.add(c)
        total += s
    return total / prev.rank


class SweepRow(NamedTuple):
    rank: int
    fit: float
    corcondia: float
    stability: float
    converged: bool


def fit_sweep(
    t,
    ranks: Sequence[int],
    tol: float = 1e-10,
    max_iter: int = 1000,
    restarts: int = 1,
    seed: int | None = 0,
    warm_start: bool = False,
) -> list[SweepRow]:
    """Fit and core consistency for each rank, for choosing ``R``.

    ``corcondia`` is NaN where it is undefined (rank above an extent).
    ``stability`` compares hub factors with the previous rank's model (NaN on
    the first row).  With ``warm_start`` each rank's first run starts from
    the previous rank's solution plus one fresh column, so fit cannot drop
    as the rank grows.
    """
    x = _nonzero_tensor(t)
    rows = []
    prev = None
    for R in ranks:
        init = prev if (warm_start and prev is not None and prev.rank < R) else None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model = cp_als(x, R, tol=tol, max_iter=max_iter, restarts=restarts, seed=seed, init=init)
        try:
            cc = corcondia(x, model)
        except ValueError:
            cc = float("nan")
        stab = factor_stability(prev, model) if prev is not None else float("nan")
        rows.append(SweepRow(int(R), model.fit, cc, stab, model.converged))
        prev = model
    return rows
