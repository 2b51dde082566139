"""Save and load fitted models as versioned JSON.

Floats are written with Python's shortest round-trip repr, so every array
comes back bit-identical and predictions after a save/load cycle match the
in-process ones exactly. The basis is rebuilt from its domain and size and
its knots are checked against the stored ones.
"""

import json

import numpy as np

from .bspline import make_basis
from .errors import InvalidArgumentError, ParseError
from .fpca import RobustEigenSystem
from .logitfit import LogitFit
from .pipeline import METHODS, FittedModel

SCHEMA_VERSION = 1


def _arr(a):
    return np.asarray(a, dtype=float).tolist()


def to_dict(model):
    """Plain-data representation of a :class:`FittedModel`."""
    fit, eigen, basis = model.fit, model.eigen, model.basis
    return {
        "schema_version": SCHEMA_VERSION,
        "method": model.method,
        "estimator": fit.estimator,
        "grid": _arr(model.grid),
        "basis": {
            "domain": [float(basis.domain[0]), float(basis.domain[1])],
            "num_functions": int(basis.num_functions),
            "order": int(basis.order),
            "knots": _arr(basis.knots),
        },
        "centering": {"mode": model.center_mode, "center": _arr(eigen.center)},
        "eigen": {
            "method": eigen.method,
            "K": int(eigen.K),
            "directions": _arr(eigen.directions),
            "eigenvalues": _arr(eigen.eigenvalues),
            "all_eigenvalues": _arr(eigen.all_eigenvalues),
            "explained": _arr(eigen.explained),
            "rank_exhausted": bool(eigen.rank_exhausted),
        },
        "theta": _arr(fit.theta),
        "weights": _arr(fit.weights),
        "diagnostics": {
            "converged": bool(fit.converged),
            "objective": float(fit.objective_value),
            "n_iter": int(fit.n_iter),
            "n_weighted": int(np.sum(fit.weights > 0)),
            "n_rejected": int(np.sum(fit.weights == 0)),
            "fit_seconds": float(model.fit_seconds),
        },
    }


def from_dict(d):
    """Rebuild a :class:`FittedModel` from :func:`to_dict` output."""
    try:
        version = d["schema_version"]
        if version != SCHEMA_VERSION:
            raise ParseError(f"unsupported model schema version {version!r}")
        if d["method"] not in METHODS:
            raise ParseError(f"unknown method {d['method']!r}")
        b = d["basis"]
        basis = make_basis(tuple(b["domain"]), int(b["num_functions"]))
        knots = np.asarray(b["knots"], dtype=float)
        if basis.order != b["order"] or not np.array_equal(basis.knots, knots):
            raise ParseError("stored knots do not match the rebuilt basis")
        e = d["eigen"]
        M = basis.num_functions
        directions = np.asarray(e["directions"], dtype=float).reshape(-1, M)
        K = directions.shape[0]
        if K != e["K"]:
            raise ParseError("eigen K does not match the stored directions")
        eigen = RobustEigenSystem(
            basis=basis,
            directions=directions,
            eigenvalues=np.asarray(e["eigenvalues"], dtype=float),
            scores=np.empty((0, K)),
            method=e["method"],
            explained=np.asarray(e["explained"], dtype=float),
            center=np.asarray(d["centering"]["center"], dtype=float),
            all_eigenvalues=np.asarray(e["all_eigenvalues"], dtype=float),
            rank_exhausted=bool(e["rank_exhausted"]),
        )
        theta = np.asarray(d["theta"], dtype=float)
        if theta.shape != (K + 1,):
            raise ParseError("theta length does not match K + 1")
        diag = d["diagnostics"]
        fit = LogitFit(
            theta=theta,
            weights=np.asarray(d["weights"], dtype=float),
            beta_coefs=directions.T @ theta[1:],
            eigen=eigen,
            estimator=d["estimator"],
            converged=bool(diag["converged"]),
            objective_value=float(diag["objective"]),
            n_iter=int(diag["n_iter"]),
        )
        return FittedModel(
            method=d["method"],
            grid=np.asarray(d["grid"], dtype=float),
            center_mode=d["centering"]["mode"],
            fit=fit,
            fit_seconds=float(diag["fit_seconds"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed model file: {exc}") from None


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(to_dict(model), fh, indent=1, allow_nan=False)
        fh.write("\n")


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"model file is not valid JSON: {exc.msg}", row=exc.lineno,
                         column=exc.colno) from None
    if not isinstance(d, dict):
        raise InvalidArgumentError("model file must hold a JSON object")
    return from_dict(d)
