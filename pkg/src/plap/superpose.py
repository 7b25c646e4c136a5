"""Weighted superpositions V = sum_i a_i w(x - y_i) (+ concave term) and
their p-Laplacian through three independent routes:

  * delta_p_direct      -- the divergence identity
                           |g|^{p-2} ((p-2) g^T H g / |g|^2 + tr H),
  * delta_p_closed_form -- the sign identity
                           -C |g|^{p-2} sum_i a_i sin^2(theta_i) / r_i^{(p+n-2)/(p-1)},
  * delta_p_fd          -- central finite differences of the analytic flux.

Also the (p, n) sign classifier of the superposition's p-Laplacian.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .concave import ConcaveTerm, ZeroTerm
from .core import Params, fundamental_profile
from .errors import (
    PoleSingularityError,
    UndefinedOperatorError,
    UnsupportedConfigurationError,
)

DEFAULT_FD_STEP = 1e-4


class SignClass(Enum):
    NON_POSITIVE = "NonPositive"
    IDENTICALLY_ZERO = "IdenticallyZero"
    NON_NEGATIVE = "NonNegative"
    EXCLUDED = "Excluded"


class PoleSet:
    """Immutable weighted pole configuration {(a_i, y_i)}.

    Duplicate locations are merged (weights summed) and zero-weight poles
    dropped at construction; at least one positive weight must remain.
    """

    def __init__(self, weights, locations, params: Params):
        w = np.atleast_1d(np.asarray(weights, dtype=float))
        y = np.atleast_2d(np.asarray(locations, dtype=float))
        if y.shape[0] != w.shape[0]:
            raise ValueError("need one location per weight")
        if y.shape[1] != params.n:
            raise ValueError(
                f"pole locations have dimension {y.shape[1]}, expected {params.n}"
            )
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        merged = {}
        for wi, yi in zip(w, y):
            if wi == 0.0:
                continue
            key = tuple(yi)
            merged[key] = merged.get(key, 0.0) + wi
        if not merged:
            raise ValueError("at least one positive weight is required")
        self.weights = np.array(list(merged.values()))
        self.locations = np.array([list(k) for k in merged])
        self.params = params
        self.weights.flags.writeable = False
        self.locations.flags.writeable = False

    def __len__(self):
        return len(self.weights)

    @property
    def gradient_epsilon(self) -> float:
        # scale-aware cutoff below which |grad V| is treated as vanishing
        return 1e-12 * max(1.0, float(self.weights.sum()))


@dataclass(frozen=True)
class EvalResult:
    """Assembled value/gradient/Hessian plus per-pole geometry.

    angles[i] is the angle in [0, pi] between x - y_i and the total
    gradient (0 by convention when the gradient vanishes).  At a pole with
    2 <= p < n the value is +inf and the derivative fields are None.
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    angles: np.ndarray
    distances: np.ndarray

    @property
    def derivatives_available(self) -> bool:
        return self.gradient is not None


def evaluate(ps: PoleSet, k: ConcaveTerm, x) -> EvalResult:
    """Value, gradient, Hessian, angles and distances of V + K at x."""
    if k is None:
        k = ZeroTerm()
    x = np.asarray(x, dtype=float)
    p, n = ps.params.p, ps.params.n
    if x.shape != (n,):
        raise ValueError(f"query point has shape {x.shape}, expected ({n},)")
    diffs = x[None, :] - ps.locations
    dists = np.linalg.norm(diffs, axis=1)
    if np.any(dists == 0.0):
        if 2 <= p < n:
            return EvalResult(
                value=math.inf,
                gradient=None,
                hessian=None,
                angles=None,
                distances=dists,
            )
        raise PoleSingularityError(
            f"evaluation at a pole is singular for p = {p}, n = {n}"
        )

    value = 0.0
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    eye = np.eye(n)
    for a, d, r in zip(ps.weights, diffs, dists):
        prof = fundamental_profile(ps.params, r)
        u = d / r
        uu = np.outer(u, u)
        value += a * prof.v
        grad += a * prof.dv * u
        hess += a * (prof.ddv * uu + (prof.dv / r) * (eye - uu))

    kv, kg, kh = k.eval(x)
    value += kv
    grad = grad + kg
    hess = hess + kh

    gn = float(np.linalg.norm(grad))
    angles = np.zeros(len(ps))
    if gn > ps.gradient_epsilon:
        u_g = grad / gn
        proj = diffs @ u_g
        rej = diffs - proj[:, None] * u_g[None, :]
        angles = np.arctan2(np.linalg.norm(rej, axis=1), proj)
    return EvalResult(
        value=float(value),
        gradient=grad,
        hessian=hess,
        angles=angles,
        distances=dists,
    )


def _finite_derivatives(res: EvalResult):
    if not res.derivatives_available:
        raise PoleSingularityError("derivatives unavailable at a pole")
    return res.gradient, res.hessian


def delta_p_direct(ps: PoleSet, k: ConcaveTerm, x) -> float:
    """p-Laplacian via the divergence identity on the assembled data.

    A vanishing gradient returns the continuous extension 0 for p > 2 and
    is an error for p < 2; p = 2 is the plain Laplacian (trace of the
    Hessian) everywhere.
    """
    res = evaluate(ps, k, x)
    grad, hess = _finite_derivatives(res)
    p = ps.params.p
    trace = float(np.trace(hess))
    if p == 2:
        return trace
    gn = float(np.linalg.norm(grad))
    if gn < ps.gradient_epsilon:
        if p > 2:
            return 0.0
        raise UndefinedOperatorError(
            "p-Laplacian undefined at vanishing gradient for p < 2"
        )
    rayleigh = float(grad @ hess @ grad) / gn**2
    return gn ** (p - 2) * ((p - 2) * rayleigh + trace)


def delta_p_closed_form(ps: PoleSet, x, k: ConcaveTerm = None) -> float:
    """p-Laplacian of the pure superposition via the sign identity.

    Only valid for K = 0; a nonzero concave term has no closed form here.
    """
    if k is not None and not isinstance(k, ZeroTerm):
        raise UnsupportedConfigurationError(
            "the closed form covers pure superpositions only (K = 0)"
        )
    res = evaluate(ps, None, x)
    _finite_derivatives(res)
    p, n = ps.params.p, ps.params.n
    if p == 2:
        return 0.0
    if len(ps) == 1:
        # the gradient is exactly (anti)parallel to x - y_1, so sin(theta) = 0
        return 0.0
    gn = float(np.linalg.norm(res.gradient))
    if gn < ps.gradient_epsilon:
        if p > 2:
            return 0.0
        raise UndefinedOperatorError(
            "p-Laplacian undefined at vanishing gradient for p < 2"
        )
    expo = (p + n - 2) / (p - 1)
    s = float(np.sum(ps.weights * np.sin(res.angles) ** 2 / res.distances**expo))
    return -ps.params.big_c * gn ** (p - 2) * s


def delta_p_fd(ps: PoleSet, k: ConcaveTerm, x, step: float = DEFAULT_FD_STEP) -> float:
    """Independent oracle: divergence of the flux |grad W|^{p-2} grad W by
    central differences of the analytic gradient, step scaled by 1 + |x|."""
    if not step > 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    p = ps.params.p
    dists = np.linalg.norm(x[None, :] - ps.locations, axis=1)
    if np.any(dists <= 10 * step):
        raise PoleSingularityError("query point too close to a pole for the FD stencil")
    h = step * (1.0 + float(np.linalg.norm(x)))

    def flux(z):
        res = evaluate(ps, k, z)
        g, _ = _finite_derivatives(res)
        gn = float(np.linalg.norm(g))
        if gn < ps.gradient_epsilon:
            if p >= 2:
                return np.zeros_like(g)
            raise UndefinedOperatorError(
                "flux undefined at vanishing gradient for p < 2"
            )
        return gn ** (p - 2) * g

    div = 0.0
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = h
        div += (flux(x + e)[j] - flux(x - e)[j]) / (2 * h)
    return div


def delta_p_scale(ps: PoleSet, k: ConcaveTerm, x) -> float:
    """Magnitude yardstick for relative comparisons between the Delta_p
    routes: the sum of absolute values of the per-term ingredients of the
    divergence identity.  Where the routes cancel to (near) zero, residuals
    are meaningful only relative to this scale."""
    if k is None:
        k = ZeroTerm()
    x = np.asarray(x, dtype=float)
    p, n = ps.params.p, ps.params.n
    res = evaluate(ps, k, x)
    grad, hess = _finite_derivatives(res)
    gn = float(np.linalg.norm(grad))
    total = 0.0
    for a, r in zip(ps.weights, res.distances):
        prof = fundamental_profile(ps.params, r)
        mag = abs(prof.ddv) + abs(prof.dv) / r
        total += a * ((n - 1 + 1) * mag + abs(p - 2) * mag)
    _, _, kh = k.eval(x)
    kmag = float(np.abs(kh).sum())
    total += (1 + abs(p - 2)) * kmag
    if p == 2:
        return max(total, 1e-300)
    if gn < ps.gradient_epsilon:
        return 1e-300
    return gn ** (p - 2) * max(total, 1e-300)


def sign_region(p: float, n: int) -> SignClass:
    """Sign of the superposition's p-Laplacian as a function of (p, n).

    Classifies by the sign of -(p-2)(p+n-2)/(p-1); the zero lines are
    p = 2, n = 1 and p + n = 2.
    """
    if p == 1:
        return SignClass.EXCLUDED
    if p == 2 or n == 1 or p + n == 2:
        return SignClass.IDENTICALLY_ZERO
    factor = -(p - 2) * (p + n - 2) / (p - 1)
    return SignClass.NON_POSITIVE if factor < 0 else SignClass.NON_NEGATIVE


def riemann_pole_set(centers, density_values, cell_volume, params: Params) -> PoleSet:
    """Finite-pole approximation of an integral potential: one pole per
    grid cell, weighted by density value times cell volume."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    vals = np.atleast_1d(np.asarray(density_values, dtype=float))
    if np.any(vals < 0):
        raise ValueError("density values must be non-negative")
    if not cell_volume > 0:
        raise ValueError("cell volume must be positive")
    weights = vals * cell_volume
    try:
        return PoleSet(weights, centers, params)
    except ValueError as exc:
        raise UnsupportedConfigurationError(
            f"Riemann pole set is empty or invalid: {exc}"
        ) from exc
