"""Classical and robust functional principal components in B-spline coordinates.

Both estimators work in the transformed coordinates ``y = Phi^{1/2} a``, in
which the L2 inner product of two curves is the Euclidean one. A unit vector
``u`` there corresponds to the eigenfunction with basis coefficients
``Phi^{-1/2} u``.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .robust_scale import MScaleConfig, mscale_rows, row_median

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RobustEigenSystem:
    """Eigenfunctions, eigenvalues and scores of a centered functional sample.

    Attributes
    ----------
    basis : BSplineBasis
    directions : ndarray, shape (K, M)
        Basis coefficients of the retained eigenfunctions (one per row),
        orthonormal in the L2 metric.
    eigenvalues : ndarray, shape (K,)
    scores : ndarray, shape (n, K)
        ``<X_i - mu, psi_k>``.
    method : {"classical", "robust"}
    explained : ndarray, shape (K,)
        Cumulative fraction of the total (over all ``K_max`` components).
    center : ndarray, shape (M,)
        Coefficients of the centering curve.
    all_eigenvalues : ndarray, shape (K_max,)
        Every eigenvalue computed before truncation.
    rank_exhausted : bool
        Robust pursuit stopped early because every candidate projection had
        zero scale.
    """

    basis: object
    directions: np.ndarray
    eigenvalues: np.ndarray
    scores: np.ndarray
    method: str
    explained: np.ndarray
    center: np.ndarray
    all_eigenvalues: np.ndarray
    rank_exhausted: bool = False

    @property
    def K(self):
        return self.directions.shape[0]

    def orthonormality_error(self):
        """Max-abs deviation of ``directions Phi directions^T`` from the identity."""
        G = self.directions @ self.basis.gram @ self.directions.T
        return float(np.max(np.abs(G - np.eye(self.K))))

    def eigenfunctions(self, t):
        from .bspline import eval_basis

        return self.directions @ eval_basis(self.basis, t).T


def _check_threshold(var_threshold):
    if not 0 < var_threshold <= 1:
        raise InvalidArgumentError(f"var_threshold must lie in (0, 1], got {var_threshold}")


def _num_components(evals, var_threshold):
    total = evals.sum()
    frac = np.cumsum(evals) / total
    # tolerance guards threshold = 1 against rounding in the cumulative sum
    K = int(np.searchsorted(frac, var_threshold - 1e-12) + 1)
    return min(K, evals.size), frac


def _fix_signs(U, basis):
    """Flip rows of ``U`` (transformed coordinates) so that each eigenfunction's
    largest-magnitude basis coefficient is positive."""
    coefs = U @ basis.gram_inv_sqrt
    idx = np.argmax(np.abs(coefs), axis=1)
    signs = np.sign(coefs[np.arange(coefs.shape[0]), idx])
    signs[signs == 0] = 1.0
    return U * signs[:, None]


def _assemble(sample, U, evals, K, frac, method, rank_exhausted=False):
    basis = sample.basis
    U = _fix_signs(U[:K], basis)
    Y = sample.coefs @ basis.gram_sqrt
    return RobustEigenSystem(
        basis=basis,
        directions=U @ basis.gram_inv_sqrt,
        eigenvalues=evals[:K].copy(),
        scores=Y @ U.T,
        method=method,
        explained=frac[:K].copy(),
        center=sample.center.copy(),
        all_eigenvalues=evals.copy(),
        rank_exhausted=rank_exhausted,
    )


def fpca_classical(sample, var_threshold=0.99):
    """Functional PCA from the covariance of the mean-centered coefficients.

    Eigen-decomposes ``Phi^{1/2} A^T A Phi^{1/2} / (n - 1)`` (via an SVD of
    ``A Phi^{1/2}``) and keeps the fewest components whose cumulative share of
    the variance reaches ``var_threshold``.
    """
    _check_threshold(var_threshold)
    if sample.n < 2:
        raise InvalidArgumentError("classical FPCA needs at least two curves")
    if not sample.centered or sample.center_mode != "mean":
        raise InvalidArgumentError("classical FPCA expects a mean-centered sample")
    Y = sample.coefs @ sample.basis.gram_sqrt
    _, sv, Vt = np.linalg.svd(Y, full_matrices=False)
    evals = sv**2 / (sample.n - 1)
    positive = evals > evals[0] * 1e-15 if evals[0] > 0 else evals > 0
    if not positive.any():
        raise InvalidArgumentError("sample has zero variance")
    evals, Vt = evals[positive], Vt[positive]
    K, frac = _num_components(evals, var_threshold)
    return _assemble(sample, Vt, evals, K, frac, "classical")


def _projection_scale(P, cfg, solver):
    loc = row_median(P)
    return mscale_rows(P - loc[:, None], cfg, solver=solver)


def _orthonormalize(W, basis_rows):
    # remove components along the (orthonormal) rows of basis_rows, twice for stability
    for _ in range(2):
        if basis_rows.size:
            W = W - (W @ basis_rows.T) @ basis_rows
    norms = np.linalg.norm(W, axis=1)
    return W, norms


def _pursue_direction(Y, found, cfg, n_refine, rng, n_partners=4, pool=10):
    """One projection-pursuit step in the orthocomplement of ``found``.

    Returns the unit direction and its robust scale, or ``(None, 0.0)`` when
    every candidate projection is degenerate.
    """
    Yk, norms = _orthonormalize(Y, found)
    scale_ref = np.max(np.linalg.norm(Y, axis=1))
    ok = norms > 1e-10 * scale_ref
    if not ok.any():
        return None, 0.0
    C = Yk[ok] / norms[ok, None]
    s = _projection_scale(C @ Yk.T, cfg, "newton")
    order = np.argsort(-s, kind="stable")
    best = order[0]
    if s[best] <= 0.0:
        return None, 0.0
    u, s_best = C[best], s[best]

    top = C[order[1 : 1 + pool]]
    M = Y.shape[1]
    # random partners live in the row space of the deflated data: components
    # outside it only dilute the projections
    _, sv, Vt = np.linalg.svd(Yk, full_matrices=False)
    span = Vt[sv > 1e-10 * scale_ref]
    angle = np.pi / 4
    for _ in range(n_refine):
        picks = top[rng.choice(top.shape[0], size=min(n_partners, top.shape[0]), replace=False)] \
            if top.shape[0] else np.empty((0, M))
        rand = (rng.standard_normal((n_partners, span.shape[0])) @ span)
        W, wn = _orthonormalize(np.vstack([picks, rand]), np.vstack([found.reshape(-1, M), u]))
        keep = wn > 1e-10
        if keep.any():
            W = W[keep] / wn[keep, None]
            angles = angle * np.array([-1.0, -0.5, 0.5, 1.0])
            D = (np.cos(angles)[:, None, None] * u + np.sin(angles)[:, None, None] * W).reshape(-1, M)
            D /= np.linalg.norm(D, axis=1)[:, None]
            sd = _projection_scale(D @ Yk.T, cfg, "newton")
            j = int(np.argmax(sd))
            if sd[j] > s_best:
                u, s_best = D[j], sd[j]
        angle *= 0.5
    # re-project against rounding drift
    u, un = _orthonormalize(u[None, :], found.reshape(-1, M))
    u = u[0] / un[0]
    s_final = _projection_scale((Yk @ u)[None, :], cfg, "newton")[0]
    return u, s_final


def fpca_robust(sample, cfg=None, var_threshold=0.99, n_refine=20, seed=0):
    """Robust functional PCA by projection pursuit of an M-scale.

    Directions are extracted one at a time. At each step every centered curve,
    projected onto the orthogonal complement of the directions already found,
    is a candidate; the one whose projections have the largest M-scale is then
    refined by ``n_refine`` rounds of random plane rotations with halving
    angles. Eigenvalues are squared M-scales, sorted in decreasing order.

    Parameters
    ----------
    sample : FunctionalSample
        Centered sample (normally by the L1-median).
    cfg : MScaleConfig, optional
    var_threshold : float
        Share of the summed robust eigenvalues the retained components must reach.
    n_refine : int
    seed : int or numpy.random.Generator
    """
    cfg = cfg or MScaleConfig()
    _check_threshold(var_threshold)
    if sample.n < 2:
        raise InvalidArgumentError("robust FPCA needs at least two curves")
    if not sample.centered:
        raise InvalidArgumentError("robust FPCA expects a centered sample")
    rng = np.random.default_rng(seed)
    basis = sample.basis
    M = basis.num_functions
    Y = sample.coefs @ basis.gram_sqrt
    k_max = min(M, sample.n - 1)

    found = np.empty((0, M))
    scales = []
    exhausted = False
    for k in range(k_max):
        u, s = _pursue_direction(Y, found, cfg, n_refine, rng)
        if u is None or s <= 0.0:
            exhausted = True
            logger.info("robust FPCA: rank exhausted after %d components", k)
            break
        found = np.vstack([found, u])
        scales.append(s)
    if not scales:
        raise InvalidArgumentError("every projection of the sample has zero robust scale")

    evals = np.asarray(scales) ** 2
    order = np.argsort(-evals, kind="stable")
    evals, found = evals[order], found[order]
    K, frac = _num_components(evals, var_threshold)
    return _assemble(sample, found, evals, K, frac, "robust", rank_exhausted=exhausted)
