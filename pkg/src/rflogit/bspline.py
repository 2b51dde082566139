"""Quadratic B-spline bases on a closed interval and their Gram matrices."""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BSpline

from .errors import DimensionError, InvalidArgumentError, OutOfDomainError

ORDER = 3  # quadratic


@dataclass(frozen=True, eq=False)
class BSplineBasis:
    """Clamped B-spline basis with equally spaced interior knots.

    Attributes
    ----------
    domain : tuple of float
        Closed interval ``(lo, hi)``.
    order : int
        Polynomial degree + 1.
    num_functions : int
        Number of basis functions ``M``.
    knots : ndarray, shape (M + order,)
        Knot vector with full multiplicity at both endpoints.
    gram : ndarray, shape (M, M)
        Inner products ``int phi_m phi_m' dt``.
    gram_sqrt, gram_inv_sqrt : ndarray, shape (M, M)
        Symmetric square root of ``gram`` and its inverse.
    """

    domain: tuple
    order: int
    num_functions: int
    knots: np.ndarray
    gram: np.ndarray = field(repr=False)
    gram_sqrt: np.ndarray = field(repr=False)
    gram_inv_sqrt: np.ndarray = field(repr=False)

    def __call__(self, t):
        return eval_basis(self, t)

    def same_as(self, other):
        return (
            isinstance(other, BSplineBasis)
            and self.order == other.order
            and self.num_functions == other.num_functions
            and np.array_equal(self.knots, other.knots)
        )


def _clamped_knots(lo, hi, num_functions, order):
    n_intervals = num_functions - order + 1
    interior = np.linspace(lo, hi, n_intervals + 1)
    return np.concatenate([np.full(order - 1, lo), interior, np.full(order - 1, hi)])


def _gram_matrix(knots, order, num_functions):
    # products of two degree-(order-1) pieces have degree 2*order-2; `order`
    # Gauss-Legendre nodes per span integrate them exactly
    nodes, weights = leggauss(order)
    breaks = np.unique(knots)
    lo, hi = breaks[:-1], breaks[1:]
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * nodes[None, :]
    w = half[:, None] * weights[None, :]
    B = BSpline.design_matrix(x.ravel(), knots, order - 1).toarray()
    G = (B * w.ravel()[:, None]).T @ B
    return 0.5 * (G + G.T)


def make_basis(domain, num_functions):
    """Build a clamped quadratic B-spline basis with ``num_functions`` elements.

    The Gram matrix is integrated exactly span by span, and its square root is
    the symmetric one obtained from an eigen-decomposition.
    """
    try:
        lo, hi = (float(v) for v in domain)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"domain must be a pair of numbers, got {domain!r}") from exc
    if not (np.isfinite(lo) and np.isfinite(hi)) or not hi > lo:
        raise InvalidArgumentError(f"domain must be a finite nondegenerate interval, got {domain!r}")
    if int(num_functions) != num_functions or num_functions < ORDER:
        raise InvalidArgumentError(f"num_functions must be an integer >= {ORDER}, got {num_functions!r}")
    num_functions = int(num_functions)

    knots = _clamped_knots(lo, hi, num_functions, ORDER)
    gram = _gram_matrix(knots, ORDER, num_functions)
    evals, evecs = np.linalg.eigh(gram)
    if evals[0] <= 0:
        raise InvalidArgumentError("Gram matrix is not positive definite")
    root = np.sqrt(evals)
    gram_sqrt = (evecs * root) @ evecs.T
    gram_inv_sqrt = (evecs / root) @ evecs.T
    for a in (knots, gram, gram_sqrt, gram_inv_sqrt):
        a.setflags(write=False)
    return BSplineBasis(
        domain=(lo, hi),
        order=ORDER,
        num_functions=num_functions,
        knots=knots,
        gram=gram,
        gram_sqrt=0.5 * (gram_sqrt + gram_sqrt.T),
        gram_inv_sqrt=0.5 * (gram_inv_sqrt + gram_inv_sqrt.T),
    )


def eval_basis(basis, t_grid):
    """Evaluate every basis function on ``t_grid``; returns a ``(len(t), M)`` array."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    lo, hi = basis.domain
    if t.ndim != 1:
        raise DimensionError("t_grid must be one-dimensional")
    bad = ~((t >= lo) & (t <= hi))
    if bad.any():
        raise OutOfDomainError(
            f"{int(bad.sum())} evaluation point(s) outside [{lo}, {hi}], e.g. {t[bad][0]!r}"
        )
    return BSpline.design_matrix(t, basis.knots, basis.order - 1).toarray()


def inner_product(basis, coef_a, coef_b):
    """L2 inner product of two expansions: ``a^T Phi b``."""
    a = np.asarray(coef_a, dtype=float)
    b = np.asarray(coef_b, dtype=float)
    M = basis.num_functions
    if a.shape[-1] != M or b.shape[-1] != M:
        raise DimensionError(f"coefficient length must be {M}, got {a.shape[-1]} and {b.shape[-1]}")
    return a @ basis.gram @ b.T
