"""Seeded simulation of curves, binary responses and planted outliers."""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import InvalidArgumentError
from .funcsample import RawCurves
from .logitfit import logistic

N_COMPONENTS = 5
CONTAMINATION_LEVELS = (0.0, 0.01, 0.05, 0.10, 0.20)


@dataclass(frozen=True)
class SimConfig:
    n: int = 1000
    grid_points: int = 201
    n_train: int = 700
    contamination: float = 0.0
    seed: int = 0
    n_runs: int = 200
    coef_param: str = "variance"
    response_flip: str = "original"

    def __post_init__(self):
        if self.response_flip not in ("original", "outlier"):
            raise InvalidArgumentError(
                f"response_flip must be 'original' or 'outlier', got {self.response_flip!r}"
            )
        if self.coef_param not in ("variance", "sd"):
            raise InvalidArgumentError(f"coef_param must be 'variance' or 'sd', got {self.coef_param!r}")
        if self.n < 2 or self.grid_points < 8:
            raise InvalidArgumentError("need n >= 2 and grid_points >= 8")
        if not 0 < self.n_train < self.n:
            raise InvalidArgumentError(f"n_train must lie in (0, n), got {self.n_train}")
        if not 0.0 <= self.contamination < 1.0:
            raise InvalidArgumentError(f"contamination must lie in [0, 1), got {self.contamination}")

    @property
    def grid(self):
        return np.linspace(0.0, 1.0, self.grid_points)

    @property
    def n_contaminated(self):
        # round half up
        return int(np.floor(self.contamination * self.n_train + 0.5))


def beta_true(t):
    """True coefficient function ``sin(pi t)``."""
    return np.sin(np.pi * np.asarray(t, dtype=float))


def component_functions(t):
    """``exp(-l^2 t) + sin(l pi t)`` for ``l = 1..5``; shape ``(5, len(t))``."""
    l = np.arange(1, N_COMPONENTS + 1)[:, None]
    t = np.asarray(t, dtype=float)[None, :]
    return np.exp(-(l**2) * t) + np.sin(l * np.pi * t)


def outlier_functions(t):
    """``2 sin(l pi t)`` for ``l = 1..5``."""
    l = np.arange(1, N_COMPONENTS + 1)[:, None]
    return 2.0 * np.sin(l * np.pi * np.asarray(t, dtype=float)[None, :])


def draw_coefficients(n, rng, coef_param="variance"):
    """Independent ``N(0, 4 l^{-3/2})`` weights.

    ``coef_param="variance"`` reads ``4 l^{-3/2}`` as the variance, ``"sd"``
    as the standard deviation.
    """
    v = 4.0 * np.arange(1, N_COMPONENTS + 1) ** -1.5
    sd = np.sqrt(v) if coef_param == "variance" else v
    return rng.standard_normal((n, N_COMPONENTS)) * sd


def linear_predictor(raw):
    """``int X_i(t) sin(pi t) dt`` by the trapezoid rule on the curves' grid."""
    return trapezoid(raw.values * beta_true(raw.grid), raw.grid, axis=1)


def generate(cfg, rng):
    """Draw ``cfg.n`` clean curves and Bernoulli responses.

    Returns
    -------
    raw : RawCurves
    y : ndarray of int, shape (n,)
    beta : callable
        The true coefficient function.
    """
    grid = cfg.grid
    zeta = draw_coefficients(cfg.n, rng, cfg.coef_param)
    raw = RawCurves(grid, zeta @ component_functions(grid))
    prob = logistic(linear_predictor(raw))
    y = (rng.random(cfg.n) < prob).astype(int)
    return raw, y, beta_true


def contaminate(raw, y, cfg, rng, train_idx=None):
    """Replace a fraction of training curves with outliers and flip their responses.

    ``round(contamination * n_train)`` rows are drawn without replacement from
    ``train_idx`` (the first ``n_train`` rows when omitted). Each chosen curve
    becomes ``1.25 sum_l zeta_l 2 sin(l pi t)`` with fresh weights.

    With ``cfg.response_flip == "original"`` the replaced row's own response
    is flipped. With ``"outlier"`` a response is first drawn from the
    outlying curve's linear predictor and then flipped, so the planted labels
    oppose the outliers' own trend.

    Returns
    -------
    raw, y, idx
        Copies of the inputs with the outliers planted, and the replaced rows.
    """
    if not cfg.contamination > 0:
        raise InvalidArgumentError("contamination must be positive")
    if train_idx is None:
        train_idx = np.arange(cfg.n_train)
    train_idx = np.asarray(train_idx)
    k = cfg.n_contaminated
    if k > train_idx.size:
        raise InvalidArgumentError(
            f"{k} contaminated rows requested but only {train_idx.size} training rows"
        )
    idx = rng.choice(train_idx, size=k, replace=False)
    values = raw.values.copy()
    values[idx] = 1.25 * draw_coefficients(k, rng, cfg.coef_param) @ outlier_functions(raw.grid)
    y = np.array(y, copy=True)
    if cfg.response_flip == "outlier":
        lin = linear_predictor(RawCurves(raw.grid, values[idx]))
        y[idx] = 1 - (rng.random(k) < logistic(lin)).astype(int)
    else:
        y[idx] = 1 - y[idx]
    return RawCurves(raw.grid, values), y, np.sort(idx)


def split(n, n_train, rng):
    """Uniform random train/test partition of ``range(n)``."""
    if not 0 < n_train < n:
        raise InvalidArgumentError(f"n_train must lie in (0, n), got {n_train} with n={n}")
    perm = rng.permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])
