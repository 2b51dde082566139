"""Discretized curves, their B-spline coefficients, and centering."""

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import trapezoid
from scipy.ndimage import uniform_filter1d

from .bspline import ORDER, eval_basis, make_basis
from .errors import (
    ConvergenceError,
    DimensionError,
    InvalidArgumentError,
    SingularDesignError,
)

logger = logging.getLogger(__name__)

MIN_GRID = 8
MAX_NUM_BASIS = 40
PLATEAU_TOL = 1e-6
# criterion values below this fraction of the curves' mean squared norm count as zero
ZERO_RESID_REL = 1e-20


@dataclass(frozen=True, eq=False)
class RawCurves:
    """``n`` curves observed on a shared, strictly increasing grid of ``J`` points."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if grid.ndim != 1:
            raise DimensionError("grid must be one-dimensional")
        if values.ndim != 2 or values.shape[1] != grid.size:
            raise DimensionError(
                f"values must have shape (n, {grid.size}), got {np.shape(self.values)}"
            )
        if grid.size < MIN_GRID:
            raise InvalidArgumentError(f"need at least {MIN_GRID} grid points, got {grid.size}")
        if not np.all(np.diff(grid) > 0):
            raise InvalidArgumentError("grid must be strictly increasing")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise InvalidArgumentError("grid and values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def domain(self):
        return (float(self.grid[0]), float(self.grid[-1]))

    def subset(self, idx):
        return RawCurves(self.grid, self.values[idx])


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """Basis coefficients of a sample of curves.

    ``coefs`` are centered (row-wise minus ``center``) when ``centered`` is
    true; ``center`` holds the coefficients of the centering curve and is all
    zeros otherwise.
    """

    basis: object
    coefs: np.ndarray
    center: np.ndarray
    centered: bool = False
    center_mode: str = "none"

    def __post_init__(self):
        coefs = np.atleast_2d(np.asarray(self.coefs, dtype=float))
        center = np.asarray(self.center, dtype=float)
        M = self.basis.num_functions
        if coefs.shape[1] != M or center.shape != (M,):
            raise DimensionError(
                f"coefficients must have {M} columns and center length {M}, "
                f"got {coefs.shape} and {center.shape}"
            )
        object.__setattr__(self, "coefs", coefs)
        object.__setattr__(self, "center", center)

    @property
    def n(self):
        return self.coefs.shape[0]

    def raw_coefs(self):
        """Uncentered coefficients."""
        return self.coefs + self.center if self.centered else self.coefs

    def evaluate(self, t):
        return self.coefs @ eval_basis(self.basis, t).T


def _lstsq_factor(design):
    q, r = np.linalg.qr(design)
    d = np.abs(np.diag(r))
    if d.size == 0 or d.min() <= 1e-10 * d.max():
        raise SingularDesignError(
            f"design matrix of shape {design.shape} is rank deficient"
        )
    return q, r


def fit_coefficients(raw, basis):
    """Least-squares B-spline coefficients of every curve in ``raw``.

    One QR factorization of the ``J x M`` design is shared by all rows.
    """
    M = basis.num_functions
    J = raw.grid.size
    if J < M + 1:
        raise SingularDesignError(f"need at least M + 1 = {M + 1} grid points, got {J}")
    lo, hi = basis.domain
    if raw.grid[0] < lo or raw.grid[-1] > hi:
        raise DimensionError(
            f"grid [{raw.grid[0]}, {raw.grid[-1]}] is not inside the basis domain [{lo}, {hi}]"
        )
    design = eval_basis(basis, raw.grid)
    q, r = _lstsq_factor(design)
    coefs = np.linalg.solve(r, q.T @ raw.values.T).T
    return FunctionalSample(basis=basis, coefs=coefs, center=np.zeros(M))


def basis_size_candidates(J, n=None):
    """Candidate basis sizes ``4, ..., min(40, J // 4)``, dropping any with ``n <= M``."""
    hi = min(MAX_NUM_BASIS, J // 4)
    cands = list(range(ORDER + 1, hi + 1))
    if n is not None:
        cands = [m for m in cands if n > m]
    return cands


def residual_criterion(raw, num_functions):
    """Mean integrated squared residual ``1/(n - M) sum_i int (X_i - Xhat_i)^2``.

    Integrals use the trapezoid rule on the observation grid.
    """
    basis = make_basis(raw.domain, num_functions)
    sample = fit_coefficients(raw, basis)
    resid = raw.values - sample.coefs @ eval_basis(basis, raw.grid).T
    total = trapezoid(resid * resid, raw.grid, axis=1).sum()
    return total / (raw.n - num_functions)


def select_num_basis(raw, return_path=False):
    """Choose the basis size by the residual criterion.

    Sweeps ``M = 4, ..., min(40, J // 4)`` and stops at the first ``M`` whose
    criterion differs from the next one by less than ``1e-6``, or whose
    criterion is already numerically zero (the curves are exactly
    representable). Without either the minimizing ``M`` is returned.

    Parameters
    ----------
    raw : RawCurves
    return_path : bool
        Also return ``{M: criterion}`` for every candidate visited.
    """
    cands = basis_size_candidates(raw.grid.size, raw.n)
    if not cands:
        raise InvalidArgumentError(
            f"no admissible basis size for J={raw.grid.size}, n={raw.n}"
        )
    floor = ZERO_RESID_REL * trapezoid(raw.values**2, raw.grid, axis=1).mean()
    path = {}
    chosen = None
    prev_m = None
    for m in cands:
        path[m] = residual_criterion(raw, m)
        if path[m] <= floor:
            chosen = m
            break
        if prev_m is not None and abs(path[prev_m] - path[m]) < PLATEAU_TOL:
            chosen = prev_m
            break
        prev_m = m
    if chosen is None:
        chosen = min(path, key=path.get)
    logger.debug("basis size %d selected from %s", chosen, path)
    return (chosen, path) if return_path else chosen


def _weiszfeld(Y, tol=1e-10, max_iter=500):
    """Geometric median of the rows of ``Y`` (Vardi-Zhang modification)."""
    n = Y.shape[0]
    u = Y.mean(axis=0)
    scale = max(np.abs(Y).max(), 1.0)
    for _ in range(max_iter):
        diff = Y - u
        dist = np.linalg.norm(diff, axis=1)
        hit = dist <= 1e-12 * scale
        w = 1.0 / np.where(hit, 1.0, dist)
        w[hit] = 0.0
        wsum = w.sum()
        if wsum == 0.0:
            return u
        T = (w[:, None] * Y).sum(axis=0) / wsum
        eta = int(hit.sum())
        if eta:
            # Vardi-Zhang: the iterate sits on a data point
            R = (w[:, None] * diff).sum(axis=0)
            r = np.linalg.norm(R)
            if r <= eta:
                return u
            gamma = eta / r
            new = (1.0 - gamma) * T + gamma * u
        else:
            new = T
        step = np.linalg.norm(new - u)
        u = new
        if step < tol * scale:
            return u
    raise ConvergenceError(f"Weiszfeld iteration did not converge in {max_iter} steps", last=u)


def l1_median(sample, tol=1e-10, max_iter=500):
    """Coefficients of the L1-median curve under the L2 metric ``v^T Phi v``."""
    A = sample.raw_coefs()
    if A.shape[0] == 1:
        return A[0].copy()
    basis = sample.basis
    # Euclidean coordinates: y = Phi^{1/2} a
    Y = A @ basis.gram_sqrt
    try:
        m = _weiszfeld(Y, tol=tol, max_iter=max_iter)
    except ConvergenceError as exc:
        raise ConvergenceError(str(exc), last=exc.last @ basis.gram_inv_sqrt) from None
    return m @ basis.gram_inv_sqrt


def center(sample, mode="mean"):
    """Center a sample by its coefficient mean or by its L1-median curve."""
    if sample.centered:
        raise InvalidArgumentError("sample is already centered")
    if mode == "mean":
        mu = sample.coefs.mean(axis=0)
    elif mode == "l1_median":
        mu = l1_median(sample)
    else:
        raise InvalidArgumentError(f"mode must be 'mean' or 'l1_median', got {mode!r}")
    return replace(
        sample, coefs=sample.coefs - mu, center=mu, centered=True, center_mode=mode
    )


def center_with(sample, mu, mode="given"):
    """Center ``sample`` with a known center (e.g. one estimated on training data)."""
    raw = sample.raw_coefs()
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (sample.basis.num_functions,):
        raise DimensionError("center length does not match the basis")
    return replace(sample, coefs=raw - mu, center=mu, centered=True, center_mode=mode)


def presmooth(raw, window):
    """Centered moving average of width ``window`` (odd, edges replicated).

    Off by default everywhere; ``window <= 1`` returns ``raw`` unchanged.
    """
    window = int(window)
    if window <= 1:
        return raw
    if window % 2 == 0 or window > raw.grid.size:
        raise InvalidArgumentError(f"window must be odd and at most {raw.grid.size}, got {window}")
    return RawCurves(raw.grid, uniform_filter1d(raw.values, window, axis=1, mode="nearest"))
