"""Estimation and classification metrics, and Monte-Carlo aggregation."""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import rankdata

from .bspline import eval_basis
from .errors import InvalidArgumentError


def imse(beta_true, beta_hat_coefs, basis, grid_points=1001):
    """Integrated squared error ``int (beta - beta_hat)^2`` by the trapezoid rule."""
    if grid_points < 101:
        raise InvalidArgumentError(f"grid_points must be >= 101, got {grid_points}")
    lo, hi = basis.domain
    t = np.linspace(lo, hi, grid_points)
    diff = np.asarray(beta_true(t), dtype=float) - eval_basis(basis, t) @ np.asarray(beta_hat_coefs)
    return float(trapezoid(diff * diff, t))


def auc(probs, y):
    """Area under the ROC curve via the Mann-Whitney rank sum (ties count 1/2)."""
    p = np.asarray(probs, dtype=float).ravel()
    y = np.asarray(y).ravel()
    if p.shape != y.shape:
        raise InvalidArgumentError("probs and y must have the same length")
    pos = y == 1
    n1 = int(pos.sum())
    n0 = int((y == 0).sum())
    if n1 + n0 != y.size:
        raise InvalidArgumentError("y must be binary 0/1")
    if n1 == 0 or n0 == 0:
        raise InvalidArgumentError("AUC needs both classes")
    ranks = rankdata(p)  # average ranks for ties
    # exact rational arithmetic: 2 * rank sums are integers
    u2 = int(round(2 * ranks[pos].sum())) - n1 * (n1 + 1)
    return u2 / (2 * n1 * n0)


def aggregate(values):
    """Median and raw (unscaled) median absolute deviation."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise InvalidArgumentError("cannot aggregate an empty vector")
    med = float(np.median(v))
    return med, float(np.median(np.abs(v - med)))


@dataclass
class McResult:
    """Per-run metrics of one method at one contamination level."""

    method: str
    contamination: float
    imse: list = field(default_factory=list)
    auc: list = field(default_factory=list)
    fit_seconds: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def median_imse(self):
        return aggregate(self.imse)[0]

    @property
    def mad_imse(self):
        return aggregate(self.imse)[1]

    @property
    def median_auc(self):
        return aggregate(self.auc)[0]

    @property
    def mad_auc(self):
        return aggregate(self.auc)[1]

    def summary_row(self):
        return {
            "method": self.method,
            "contamination": self.contamination,
            "median_imse": self.median_imse,
            "mad_imse": self.mad_imse,
            "median_auc": self.median_auc,
            "mad_auc": self.mad_auc,
        }
