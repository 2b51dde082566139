"""Logistic regression on principal component scores.

Two estimators are provided: plain maximum likelihood (IRLS) and the
weighted Bianco-Yohai (WBY) M-estimator, which bounds the influence of
large deviances through ``rho2`` and downweights high-leverage score rows.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import minimize
from scipy.special import erfc, expit
from scipy.stats import chi2

from .errors import (
    ConvergenceError,
    DegenerateScoresError,
    DimensionError,
    InvalidArgumentError,
    SeparationError,
    SingleClassError,
)
from .funcsample import center_with
from .robust_scale import MAD_CONSISTENCY, psi2, rho2

logger = logging.getLogger(__name__)

SEPARATION_NORM = 1e3


@dataclass(frozen=True, eq=False)
class LogitFit:
    """Fitted score-space logistic model.

    Attributes
    ----------
    theta : ndarray, shape (1 + K,)
        Intercept followed by the score coefficients ``gamma``.
    weights : ndarray, shape (n,)
        0/1 observation weights (all ones for maximum likelihood).
    beta_coefs : ndarray, shape (M,)
        Basis coefficients of the coefficient function, ``directions.T @ gamma``.
    eigen : RobustEigenSystem
    estimator : {"ml", "wby"}
    converged : bool
    objective_value : float
    """

    theta: np.ndarray
    weights: np.ndarray
    beta_coefs: np.ndarray
    eigen: object
    estimator: str
    converged: bool
    objective_value: float
    n_iter: int = 0

    @property
    def intercept(self):
        return float(self.theta[0])

    @property
    def gamma(self):
        return self.theta[1:]


def logistic(u):
    """``1 / (1 + exp(-u))`` without overflow."""
    out = expit(np.asarray(u, dtype=float))
    return out if out.ndim else float(out)


def _softplus(x):
    return np.logaddexp(0.0, x)


def deviance(kappa, y):
    """Logistic deviance component ``-y ln F(kappa) - (1 - y) ln(1 - F(kappa))``."""
    kappa = np.asarray(kappa, dtype=float)
    y = np.asarray(y)
    out = np.where(y == 1, _softplus(-kappa), _softplus(kappa))
    return out if out.ndim else float(out)


def _D_neglog(t, c):
    """``D(u) = int_0^u psi2(-ln s) ds`` evaluated at ``u = exp(-t)``."""
    t = np.asarray(t, dtype=float)
    u = np.exp(-t)
    sc = np.sqrt(c)
    # below e^{-c}: substitute s = e^{-v^2}; the integral reduces to erfc
    st = np.sqrt(np.maximum(t, c))
    low = u * np.exp(-st) - 0.5 * np.sqrt(np.pi) * np.exp(0.25) * erfc(st + 0.5)
    d_edge = np.exp(-c) * np.exp(-sc) - 0.5 * np.sqrt(np.pi) * np.exp(0.25) * erfc(sc + 0.5)
    high = d_edge + (u - np.exp(-c)) * np.exp(-sc)
    return np.where(t > c, low, high)


def D(u, c=0.5):
    """``int_0^u psi2(-ln s) ds`` for ``u`` in ``[0, 1]``, in closed form."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise InvalidArgumentError("D is defined on [0, 1]")
    with np.errstate(divide="ignore"):
        t = -np.log(u)
    out = np.where(u > 0, _D_neglog(np.where(u > 0, t, 1.0), c), 0.0)
    return out if out.ndim else float(out)


def bias_correction(kappa, c=0.5):
    """Fisher-consistency term ``D(F(k)) + D(1 - F(k)) + D(1)``."""
    if not c > 0:
        raise InvalidArgumentError(f"c must be positive, got {c}")
    kappa = np.asarray(kappa, dtype=float)
    out = _D_neglog(_softplus(-kappa), c) + _D_neglog(_softplus(kappa), c) + _D_neglog(0.0, c)
    return out if out.ndim else float(out)


def robust_weights(scores, eigenvalues, quantile=0.975):
    """Hard-rejection weights from a coordinatewise robust Mahalanobis distance.

    Each score column is standardized by its median and normalized MAD
    (``sqrt(eigenvalue)`` when the MAD vanishes). Rows whose squared distance
    exceeds the chi-square ``quantile`` with ``K`` degrees of freedom get
    weight 0.
    """
    S = np.atleast_2d(np.asarray(scores, dtype=float))
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    n, K = S.shape
    if lam.size != K:
        raise DimensionError(f"{K} score columns but {lam.size} eigenvalues")
    if not 0 < quantile < 1:
        raise InvalidArgumentError(f"quantile must lie in (0, 1), got {quantile}")
    med = np.median(S, axis=0)
    spread = MAD_CONSISTENCY * np.median(np.abs(S - med), axis=0)
    zero = spread == 0
    spread[zero] = np.sqrt(np.where(lam[zero] > 0, lam[zero], 0.0))
    usable = spread > 0
    if not usable.any():
        raise DegenerateScoresError("every score column has zero dispersion")
    Z = (S[:, usable] - med[usable]) / spread[usable]
    d2 = np.sum(Z * Z, axis=1)
    return (d2 <= chi2.ppf(quantile, K)).astype(float)


def _check_response(y, n):
    y = np.asarray(y)
    if y.shape != (n,):
        raise DimensionError(f"response must have length {n}, got shape {y.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise InvalidArgumentError("response must be binary 0/1")
    return y.astype(float)


def _design(scores):
    S = np.atleast_2d(np.asarray(scores, dtype=float))
    return np.column_stack([np.ones(S.shape[0]), S])


def wby_objective(theta, Z, y, w, c=0.5, loss="croux"):
    """WBY objective and gradient.

    ``loss="identity"`` replaces ``rho2`` by the identity, which turns the
    objective into the (shifted) negative log-likelihood.
    """
    val, g_obs = _obs_terms(Z @ theta, y, c, loss)
    return float(np.sum(w * val)), Z.T @ (w * g_obs)


def _obs_terms(kappa, y, c=0.5, loss="croux"):
    # per-observation loss and its derivative in kappa
    sp_pos = _softplus(-kappa)  # -ln F(kappa)
    sp_neg = _softplus(kappa)  # -ln(1 - F(kappa))
    d = np.where(y == 1, sp_pos, sp_neg)
    F = expit(kappa)
    Fc = expit(-kappa)
    d_prime = np.where(y == 1, -Fc, F)
    if loss == "croux":
        val = rho2(d, c) + _D_neglog(sp_pos, c) + _D_neglog(sp_neg, c) + _D_neglog(0.0, c)
        dC = F * Fc * (psi2(sp_pos, c) - psi2(sp_neg, c))
        return val, psi2(d, c) * d_prime + dC
    if loss == "identity":
        # D(u) = u, so the correction is the constant 2
        return d + 2.0, d_prime
    raise InvalidArgumentError(f"unknown loss {loss!r}")


def _newton_polish(theta, Z, y, w, c, max_steps=10):
    """Drive the analytic gradient to rounding level after BFGS.

    The curvature of each observation's loss in ``kappa`` comes from central
    differences of its analytic derivative; steps are kept only while they
    shrink the gradient without raising the objective.
    """
    f, g = wby_objective(theta, Z, y, w, c)
    gnorm = np.linalg.norm(g)
    for _ in range(max_steps):
        kappa = Z @ theta
        h = 1e-5 * np.maximum(1.0, np.abs(kappa))
        curv = (_obs_terms(kappa + h, y, c)[1] - _obs_terms(kappa - h, y, c)[1]) / (2.0 * h)
        H = Z.T @ ((w * curv)[:, None] * Z)
        try:
            step = -cho_solve(cho_factor(H), g)
        except np.linalg.LinAlgError:
            break
        f_new, g_new = wby_objective(theta + step, Z, y, w, c)
        g_new_norm = np.linalg.norm(g_new)
        if not (g_new_norm < gnorm and f_new <= f + 1e-12 * abs(f)):
            break
        theta, f, g, gnorm = theta + step, f_new, g_new, g_new_norm
    return theta


def _irls(Z, y, w, tol=1e-10, max_iter=100):
    theta = np.zeros(Z.shape[1])
    for it in range(1, max_iter + 1):
        kappa = Z @ theta
        p = expit(kappa)
        W = w * p * (1.0 - p)
        H = Z.T @ (W[:, None] * Z)
        g = Z.T @ (w * (y - p))
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        theta = theta + step
        if not np.all(np.isfinite(theta)) or np.linalg.norm(theta) > SEPARATION_NORM:
            raise SeparationError(
                "maximum likelihood estimate diverges: the classes are separated by the scores"
            )
        if np.max(np.abs(step)) < tol * max(1.0, np.max(np.abs(theta))):
            return theta, it, True
    kappa = Z @ theta
    margin = (2 * y - 1) * kappa
    if np.all(margin[w > 0] > 0):
        raise SeparationError(
            "maximum likelihood estimate diverges: the classes are separated by the scores"
        )
    return theta, max_iter, False


def _finish(theta, weights, eigen, estimator, converged, objective, n_iter):
    theta = np.asarray(theta, dtype=float)
    beta = eigen.directions.T @ theta[1:] if eigen is not None else None
    return LogitFit(
        theta=theta,
        weights=weights,
        beta_coefs=beta,
        eigen=eigen,
        estimator=estimator,
        converged=bool(converged),
        objective_value=float(objective),
        n_iter=int(n_iter),
    )


def fit_ml(scores, y, eigen=None, weights=None, tol=1e-10, max_iter=100):
    """Maximum likelihood logistic regression by iteratively reweighted least squares.

    Raises
    ------
    SeparationError
        If the coefficients diverge.
    ConvergenceError
        If IRLS does not settle within ``max_iter`` steps.
    """
    Z = _design(scores)
    n = Z.shape[0]
    y = _check_response(y, n)
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    sel = y[w > 0]
    if sel.size == 0 or sel.min() == sel.max():
        raise SingleClassError("response has a single class among the weighted rows")
    theta, n_iter, ok = _irls(Z, y, w, tol=tol, max_iter=max_iter)
    if not ok:
        raise ConvergenceError(f"IRLS did not converge in {max_iter} iterations", last=theta)
    nll = float(np.sum(w * deviance(Z @ theta, y)))
    return _finish(theta, w, eigen, "ml", True, nll, n_iter)


def fit_wby(scores, y, eigen, c=0.5, quantile=0.975, n_restarts=10, seed=0,
            gtol=1e-8, max_iter=500):
    """Weighted Bianco-Yohai estimate of the score-space logistic model.

    Minimizes ``sum_i w_i [rho2(d(z_i' theta; y_i)) + C(z_i' theta)]`` with
    BFGS from the weighted ML estimate, plus ``n_restarts`` seeded random
    restarts around it; the lowest objective wins.

    Parameters
    ----------
    scores : array_like, shape (n, K)
    y : array_like, shape (n,)
    eigen : RobustEigenSystem
        Supplies the eigenvalues for the leverage weights and the directions
        for the coefficient function.
    c : float
        Tuning constant of ``rho2``.
    quantile : float
        Chi-square quantile for the leverage weights.
    """
    Z = _design(scores)
    n, p = Z.shape
    if p < 2:
        raise InvalidArgumentError("at least one score column is required")
    y = _check_response(y, n)
    lam = eigen.eigenvalues if eigen is not None else np.var(Z[:, 1:], axis=0, ddof=1)
    w = robust_weights(Z[:, 1:], lam, quantile)
    sel = y[w > 0]
    if sel.size == 0 or sel.min() == sel.max():
        raise SingleClassError("response has a single class after leverage weighting")

    theta0, _, _ = _irls(Z, y, w)

    def fun(theta):
        return wby_objective(theta, Z, y, w, c)

    opts = {"gtol": gtol, "maxiter": max_iter}
    best = minimize(fun, theta0, jac=True, method="BFGS", options=opts)
    n_iter = best.nit
    rng = np.random.default_rng(seed)
    spread = 0.5 * max(np.linalg.norm(theta0), 0.1)
    for _ in range(n_restarts):
        start = theta0 + spread * rng.standard_normal(p)
        res = minimize(fun, start, jac=True, method="BFGS", options=opts)
        n_iter += res.nit
        if res.fun < best.fun:
            best = res
    theta = _newton_polish(best.x, Z, y, w, c)
    if np.linalg.norm(theta) > SEPARATION_NORM:
        raise SeparationError("WBY estimate diverges: the weighted classes are separated")
    best_fun = fun(theta)[0]
    f0 = fun(theta0)[0]
    if f0 < best_fun:
        theta, best_fun = theta0, f0
    _, grad = fun(theta)
    converged = bool(best.success) or np.max(np.abs(grad)) <= 1e-6 * n
    return _finish(theta, w, eigen, "wby", converged, best_fun, n_iter)


def linear_scores(fit, sample):
    """Scores of ``sample`` on the fitted eigenfunctions, centered at the training center."""
    eigen = fit.eigen
    basis = eigen.basis
    if not basis.same_as(sample.basis):
        raise DimensionError("sample basis differs from the fitted basis")
    centered = center_with(sample, eigen.center)
    return centered.coefs @ basis.gram @ eigen.directions.T


def predict_proba(fit, sample, path="scores"):
    """Success probabilities for the curves in ``sample``.

    ``path="scores"`` uses ``theta0 + xi' gamma``; ``path="function"``
    integrates the centered curves against the coefficient function.
    """
    if path == "scores":
        kappa = fit.intercept + linear_scores(fit, sample) @ fit.gamma
    elif path == "function":
        eigen = fit.eigen
        if not eigen.basis.same_as(sample.basis):
            raise DimensionError("sample basis differs from the fitted basis")
        centered = center_with(sample, eigen.center)
        kappa = fit.intercept + centered.coefs @ eigen.basis.gram @ fit.beta_coefs
    else:
        raise InvalidArgumentError(f"unknown path {path!r}")
    return logistic(kappa)


def predict(fit, sample):
    """Probabilities and 0/1 labels (threshold 0.5)."""
    prob = np.atleast_1d(predict_proba(fit, sample))
    return prob, (prob >= 0.5).astype(int)
