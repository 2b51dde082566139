"""Robust functional logistic regression.

Curves observed on a grid are expanded in a quadratic B-spline basis,
reduced to robust functional principal component scores by projection
pursuit of an M-scale, and a binary response is regressed on the scores
with a weighted Bianco-Yohai estimator.
"""

from .bspline import BSplineBasis, eval_basis, inner_product, make_basis
from .errors import (
    ConvergenceError,
    DegenerateScoresError,
    DimensionError,
    InvalidArgumentError,
    ParseError,
    RFLogitError,
    SeparationError,
    SingleClassError,
)
from .fpca import RobustEigenSystem, fpca_classical, fpca_robust
from .funcsample import (
    FunctionalSample,
    RawCurves,
    center,
    fit_coefficients,
    l1_median,
    select_num_basis,
)
from .logitfit import LogitFit, fit_ml, fit_wby, predict, predict_proba
from .metrics import auc, imse
from .modelfile import load_model, save_model
from .pipeline import FittedModel, fit_model
from .montecarlo import McConfig, run_mc
from .robust_scale import MScaleConfig, mscale
from .simgen import SimConfig, contaminate, generate, split

__version__ = "0.1.0"
