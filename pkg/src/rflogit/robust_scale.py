"""Bounded loss functions and the M-estimator of scale.

``rho1`` is the Beaton-Tukey biweight loss used by the M-scale; ``rho2`` is
the Croux-Haesbroeck loss applied to logistic deviances.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidArgumentError

MAD_CONSISTENCY = 1.4826


@dataclass(frozen=True)
class MScaleConfig:
    """Tuning of the M-scale.

    With ``c1 = 1.56`` and ``delta = 0.5`` the estimator has a 50% breakdown
    point and is consistent at the normal distribution.
    """

    c1: float = 1.56
    delta: float = 0.5
    tol: float = 1e-9
    max_iter: int = 200

    def __post_init__(self):
        if not self.c1 > 0:
            raise InvalidArgumentError(f"c1 must be positive, got {self.c1}")
        if not 0 < self.delta < 1:
            raise InvalidArgumentError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.tol > 0:
            raise InvalidArgumentError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidArgumentError(f"max_iter must be >= 1, got {self.max_iter}")


def rho1(u, c=1.56):
    """Biweight loss: ``u^2/2 (1 - u^2/c^2 + u^4/(3c^4))`` inside ``[-c, c]``, ``c^2/6`` outside."""
    if not c > 0:
        raise InvalidArgumentError(f"c must be positive, got {c}")
    u = np.asarray(u, dtype=float)
    v = np.minimum((u / c) ** 2, 1.0)
    out = (c * c / 6.0) * v * (3.0 - 3.0 * v + v * v)
    return out if out.ndim else float(out)


def psi1(u, c=1.56):
    """Derivative of :func:`rho1`: ``u (1 - (u/c)^2)^2`` inside ``[-c, c]``, zero outside."""
    u = np.asarray(u, dtype=float)
    out = np.where(np.abs(u) <= c, u * (1.0 - (u / c) ** 2) ** 2, 0.0)
    return out if out.ndim else float(out)


def mscale(z, mu=None, cfg=None, solver="newton"):
    """M-estimate of scale of ``z`` about the location ``mu``.

    Solves ``mean(rho1((z - mu) / s) / (c1^2 / 6)) = delta`` starting from the
    normalized MAD (mean absolute deviation if the MAD is zero). See
    :func:`mscale_rows` for the two solvers.

    Parameters
    ----------
    z : array_like, shape (n,)
    mu : float, optional
        Location. Defaults to the sample median.
    cfg : MScaleConfig, optional
    solver : {"newton", "fixed_point"}

    Returns
    -------
    float
        The scale; zero when at least ``n (1 - delta)`` residuals vanish.
    """
    cfg = cfg or MScaleConfig()
    z = np.asarray(z, dtype=float).ravel()
    if z.size == 0:
        raise InvalidArgumentError("mscale needs at least one observation")
    if not np.all(np.isfinite(z)):
        raise InvalidArgumentError("mscale input must be finite")
    if mu is None:
        mu = float(np.median(z))
    return float(mscale_rows((z - mu)[None, :], cfg, solver=solver)[0])


def row_median(X):
    """Median along the last axis via partial sorting (faster than ``np.median``)."""
    X = np.asarray(X, dtype=float)
    n = X.shape[-1]
    h = n // 2
    if n % 2:
        return np.partition(X, h, axis=-1)[..., h]
    part = np.partition(X, (h - 1, h), axis=-1)
    return 0.5 * (part[..., h - 1] + part[..., h])


def mscale_rows(R, cfg=None, tol=None, solver="newton"):
    """M-scale of every row of the residual matrix ``R`` (locations already removed).

    Parameters
    ----------
    R : array_like, shape (p, n)
        One sample of ``n`` residuals per row.
    cfg : MScaleConfig, optional
    tol : float, optional
        Overrides ``cfg.tol``.
    solver : {"newton", "fixed_point"}
        ``"newton"`` runs bracketed Newton steps on ``log s^2`` and converges
        quadratically. ``"fixed_point"`` iterates ``s^2 <- s^2 mean(rho) / delta``
        and ends with one Newton step; it converges linearly, slowly when few
        residuals lie inside ``c1 s``.

    Returns
    -------
    ndarray, shape (p,)
    """
    cfg = cfg or MScaleConfig()
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[1] == 0:
        raise InvalidArgumentError("R must be a 2-d array with at least one column")
    if solver not in ("fixed_point", "newton"):
        raise InvalidArgumentError(f"unknown solver {solver!r}")
    tol = cfg.tol if tol is None else tol

    p, n = R.shape
    delta = cfg.delta
    absR = np.abs(R)
    sigma = np.zeros(p)
    n_zero = np.count_nonzero(absR == 0.0, axis=1)
    live = n_zero < n * (1.0 - delta)
    if not live.any():
        return sigma
    if not live.all():
        absR = absR[live]

    s = MAD_CONSISTENCY * row_median(absR)
    flat = s == 0.0
    if flat.any():
        s[flat] = absR[flat].mean(axis=1)
    # squared residuals in units of c1^2
    U = absR
    U *= U
    U /= cfg.c1 * cfg.c1
    s2 = s * s
    if solver == "fixed_point":
        s2 = _fixed_point(U, s2, delta, tol, cfg.max_iter)
        s2 = _newton_step(U, s2, delta)
    else:
        s2 = _newton(U, s2, delta, tol, cfg.max_iter)
    sigma[live] = np.sqrt(s2)
    return sigma


def _rho_norm(U, s2):
    # rho1 / sup(rho1) as a function of v = u^2 / c^2, clipped at 1
    v = U / s2[:, None]
    np.minimum(v, 1.0, out=v)
    w = v - 3.0
    w *= v
    w += 3.0
    w *= v
    return v, w


def _fixed_point(U, s2, delta, tol, max_iter):
    prev_step = np.zeros(s2.size)
    active = np.arange(s2.size)
    sub = U
    for _ in range(max_iter):
        _, w = _rho_norm(sub, s2[active])
        ratio = w.mean(axis=1) / delta
        s2[active] *= ratio
        step = np.abs(np.sqrt(ratio) - 1.0)
        # linear convergence: the remaining error is about step * q / (1 - q)
        prev = prev_step[active]
        q = np.ones_like(step)
        np.divide(step, prev, out=q, where=prev > 0)
        np.clip(q, 0.0, 0.99, out=q)
        prev_step[active] = step
        keep = step * q / (1.0 - q) >= tol
        if not keep.any():
            return s2
        if not keep.all():
            active = active[keep]
            sub = U[active]
    raise ConvergenceError(
        f"M-scale fixed point did not converge in {max_iter} iterations", last=np.sqrt(s2)
    )


def _newton_step(U, s2, delta):
    v, w = _rho_norm(U, s2)
    f = w.mean(axis=1) - delta
    # d rho_norm / d log s^2 = -3 v (1 - v)^2
    df = -3.0 * np.mean(v * (1.0 - v) ** 2, axis=1)
    ok = df < 0
    step = np.zeros_like(s2)
    step[ok] = -f[ok] / df[ok]
    return s2 * np.exp(np.clip(step, -1.0, 1.0))


def _newton(U, s2, delta, tol, max_iter):
    # Newton on x = log s^2, where f(x) = mean(rho_norm) - delta is decreasing;
    # a per-row bracket turns any step that leaves it into a bisection
    x = np.log(s2)
    lo = np.full(x.size, -np.inf)
    hi = np.full(x.size, np.inf)
    active = np.arange(x.size)
    sub = U
    for _ in range(max_iter):
        xa = x[active]
        v, w = _rho_norm(sub, np.exp(xa))
        f = w.mean(axis=1) - delta
        df = -3.0 * np.mean(v * (1.0 - v) ** 2, axis=1)
        lo_a = np.where(f > 0, xa, lo[active])
        hi_a = np.where(f > 0, hi[active], xa)
        lo[active], hi[active] = lo_a, hi_a
        step = np.where(df < 0, -f / np.where(df < 0, df, -1.0), np.sign(f))
        np.clip(step, -1.0, 1.0, out=step)
        new = xa + step
        # relative change in s is half the change in log s^2; a converged
        # step may touch the bracket end set by this very iterate, so test
        # convergence before the bracket
        done = (0.5 * np.abs(step) < tol) | (f == 0)
        bounded = np.isfinite(lo_a) & np.isfinite(hi_a)
        outside = bounded & ~done & ((new <= lo_a) | (new >= hi_a))
        new[outside] = 0.5 * (lo_a[outside] + hi_a[outside])
        x[active] = new
        keep = ~done & (0.5 * np.abs(new - xa) >= tol)
        if not keep.any():
            return np.exp(x)
        if not keep.all():
            active = active[keep]
            sub = U[active]
    raise ConvergenceError(
        f"M-scale Newton iteration did not converge in {max_iter} iterations", last=np.exp(0.5 * x)
    )


def rho2(u, c=0.5):
    """Croux-Haesbroeck loss for nonnegative deviances.

    Linear with slope ``exp(-sqrt(c))`` up to ``c``, then
    ``-2 exp(-sqrt(u)) (1 + sqrt(u)) + exp(-sqrt(c)) (2 (1 + sqrt(c)) + c)``.
    """
    if not c > 0:
        raise InvalidArgumentError(f"c must be positive, got {c}")
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise InvalidArgumentError("rho2 is defined for nonnegative arguments only")
    sc = np.sqrt(c)
    su = np.sqrt(np.maximum(u, c))
    tail = -2.0 * np.exp(-su) * (1.0 + su) + np.exp(-sc) * (2.0 * (1.0 + sc) + c)
    out = np.where(u <= c, u * np.exp(-sc), tail)
    return out if out.ndim else float(out)


def psi2(u, c=0.5):
    """Derivative of :func:`rho2`."""
    u = np.asarray(u, dtype=float)
    out = np.exp(-np.sqrt(np.maximum(u, c)))
    return out if out.ndim else float(out)
