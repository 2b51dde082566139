"""End-to-end fitting: raw curves -> basis coefficients -> FPCA -> logistic fit."""

import logging
import time
from dataclasses import dataclass

import numpy as np

from .bspline import make_basis
from .errors import InvalidArgumentError
from .fpca import fpca_classical, fpca_robust
from .funcsample import center, fit_coefficients, select_num_basis
from .logitfit import fit_ml, fit_wby, predict
from .robust_scale import MScaleConfig

logger = logging.getLogger(__name__)

METHODS = ("fpca-ml", "rfpca-wby")


@dataclass(frozen=True, eq=False)
class FittedModel:
    method: str
    grid: np.ndarray
    center_mode: str
    fit: object  # LogitFit; fit.eigen carries basis, center, directions
    fit_seconds: float = 0.0

    @property
    def basis(self):
        return self.fit.eigen.basis

    @property
    def eigen(self):
        return self.fit.eigen

    def predict(self, raw):
        """Probabilities and labels for new curves on the training grid."""
        from .errors import DimensionError

        if raw.grid.shape != self.grid.shape or not np.allclose(raw.grid, self.grid, rtol=0, atol=1e-12):
            raise DimensionError(
                f"curves are observed on {raw.grid.size} points; the model expects {self.grid.size}"
            )
        sample = fit_coefficients(raw, self.basis)
        return predict(self.fit, sample)


def fit_model(raw, y, method="rfpca-wby", num_basis=None, var_threshold=0.99, seed=0,
              mscale_cfg=None, wby_c=0.5):
    """Fit a functional logistic model to curves ``raw`` and responses ``y``.

    Parameters
    ----------
    raw : RawCurves
    y : array_like of {0, 1}
    method : {"fpca-ml", "rfpca-wby"}
        ``"fpca-ml"``: mean centering, classical FPCA, maximum likelihood.
        ``"rfpca-wby"``: L1-median centering, robust FPCA, WBY estimator.
    num_basis : int, optional
        Number of B-spline functions; selected from the data when omitted.
    """
    if method not in METHODS:
        raise InvalidArgumentError(f"method must be one of {METHODS}, got {method!r}")
    t0 = time.perf_counter()
    if num_basis is None:
        num_basis = select_num_basis(raw)
    basis = make_basis(raw.domain, num_basis)
    sample = fit_coefficients(raw, basis)
    if method == "fpca-ml":
        sample = center(sample, "mean")
        eigen = fpca_classical(sample, var_threshold)
        fit = fit_ml(eigen.scores, y, eigen)
    else:
        sample = center(sample, "l1_median")
        eigen = fpca_robust(sample, mscale_cfg, var_threshold, seed=seed)
        fit = fit_wby(eigen.scores, y, eigen, c=wby_c, seed=seed)
    elapsed = time.perf_counter() - t0
    logger.info("%s: M=%d K=%d rejected=%d objective=%.6g (%.2fs)", method, num_basis,
                eigen.K, int(np.sum(fit.weights == 0)), fit.objective_value, elapsed)
    return FittedModel(method=method, grid=raw.grid.copy(), center_mode=sample.center_mode,
                       fit=fit, fit_seconds=elapsed)
