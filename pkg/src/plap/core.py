"""Radial calculus and closed-form fundamental solutions of the p-Laplacian.

A radial function f(x) = v(|x - y|) has

    grad f = v'(r) * (x－y)/r,
    Hess f = v'' * u u^T + (v'/r) * (I - u u^T),      u = (x-y)/r,
    lap  f = v'' + (n-1) * v'/r,

and the fundamental solution has v'(r) = -c * r^((1-n)/(p-1)), which makes
(p-1) v'' + (n-1) v'/r vanish identically.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirectionError, PoleSingularityError


@dataclass(frozen=True)
class Params:
    """Exponent p, dimension n and the positive normalization constant c.

    p = 1 is excluded: there are no non-constant radial solutions and every
    sign statement downstream breaks down there.
    """

    p: float
    n: int
    c: float = 1.0

    def __post_init__(self):
        if self.p == 1:
            raise ValueError("p = 1 is excluded")
        if self.n < 1 or int(self.n) != self.n:
            raise ValueError(f"n must be an integer >= 1, got {self.n}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")

    @property
    def big_c(self) -> float:
        """c * (p-2)(p+n-2)/(p-1), the prefactor of the sign identity.

        Recomputed on access so it can never go stale.
        """
        p, n = self.p, self.n
        return self.c * (p - 2) * (p + n - 2) / (p - 1)


@dataclass(frozen=True)
class RadialProfile:
    """Value and first two radial derivatives of the profile at radius r."""

    r: float
    v: float
    dv: float
    ddv: float


def fundamental_profile(params: Params, r: float) -> RadialProfile:
    """Closed-form fundamental-solution profile at radius r > 0.

    v = -c (p-1)/(p-n) r^((p-n)/(p-1)) for p != n, v = -c ln r for p = n.
    Branch selection is by exact equality of p and n.
    """
    if not r > 0:
        raise PoleSingularityError(f"radius must be positive, got {r}")
    p, n, c = params.p, params.n, params.c
    if p == n:
        v = -c * np.log(r)
    else:
        a = (p - n) / (p - 1)
        v = -c * (p - 1) / (p - n) * r**a
    e = (1 - n) / (p - 1)
    dv = -c * r**e
    ddv = -c * e * r ** (e - 1)
    return RadialProfile(r=float(r), v=float(v), dv=float(dv), ddv=float(ddv))


def radial_gradient(params: Params, x, y) -> np.ndarray:
    """Gradient of w(x - y) at x, i.e. v'(r) * (x-y)/r."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = float(np.linalg.norm(d))
    if r == 0.0:
        raise PoleSingularityError("gradient requested at the pole")
    prof = fundamental_profile(params, r)
    return prof.dv * d / r


def radial_hessian(params: Params, x, y) -> np.ndarray:
    """Hessian of w(x - y) at x: v'' u u^T + (v'/r)(I - u u^T)."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = float(np.linalg.norm(d))
    if r == 0.0:
        raise PoleSingularityError("Hessian requested at the pole")
    prof = fundamental_profile(params, r)
    u = d / r
    uu = np.outer(u, u)
    eye = np.eye(len(d))
    return prof.ddv * uu + (prof.dv / r) * (eye - uu)


def rayleigh_quotient(hess: np.ndarray, z) -> float:
    """z^T H z / |z|^2.

    For a radial Hessian this equals v'' cos^2(theta) + (v'/r) sin^2(theta)
    with theta the angle between x - y and z.
    """
    z = np.asarray(z, dtype=float)
    zz = float(z @ z)
    if zz == 0.0:
        raise DegenerateDirectionError("Rayleigh quotient of the zero vector")
    return float(z @ np.asarray(hess) @ z) / zz
