"""Randomized invariant suites, shared between the CLI ``verify`` command
and the test suite.  Each check reports its worst residual; a suite passes
when every check does."""

from dataclasses import dataclass, field

import numpy as np

from . import comparison, concave, evolution, superpose
from .core import Params

DEFAULT_SEED = 20160118
SUITE_NAMES = ("superpose", "concave", "comparison", "evolution")


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst_residual: float
    tolerance: float

    def to_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "worst_residual": float(self.worst_residual),
            "tolerance": float(self.tolerance),
        }


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, worst, tol):
        self.checks.append(
            CheckResult(name=name, passed=worst <= tol, worst_residual=worst, tolerance=tol)
        )

    def to_dict(self):
        return {
            "suite": self.suite,
            "passed": bool(self.passed),
            "checks": [c.to_dict() for c in self.checks],
        }


def _random_pole_set(rng, p, n, max_poles=8):
    count = int(rng.integers(1, max_poles + 1))
    weights = rng.uniform(0.2, 2.0, count)
    locations = rng.uniform(-1.0, 1.0, (count, n))
    return superpose.PoleSet(weights, locations, Params(float(p), int(n), 1.0))


def _random_point_away(rng, ps, margin=0.3, span=2.0):
    n = ps.params.n
    while True:
        x = rng.uniform(-span, span, n)
        if np.min(np.linalg.norm(x[None, :] - ps.locations, axis=1)) >= margin:
            return x


def _rel(a, b, scale):
    return abs(a - b) / max(abs(a), abs(b), scale)


def verify_superpose(seed=DEFAULT_SEED, configs=200) -> SuiteReport:
    rng = np.random.default_rng(seed)
    rep = SuiteReport("superpose")
    worst_dc = worst_fd = worst_sign = worst_iso = worst_scal = worst_null = 0.0
    for _ in range(configs):
        p = float(rng.choice([2.0, 2.5, 3.0, 4.0]))
        n = int(rng.choice([2, 3, 5]))
        ps = _random_pole_set(rng, p, n)
        x = _random_point_away(rng, ps)
        d = superpose.delta_p_direct(ps, None, x)
        c = superpose.delta_p_closed_form(ps, x)
        f = superpose.delta_p_fd(ps, None, x)
        scale = superpose.delta_p_scale(ps, None, x)
        worst_dc = max(worst_dc, _rel(d, c, scale))
        worst_fd = max(worst_fd, _rel(f, c, scale))

        region = superpose.sign_region(p, n)
        if region is superpose.SignClass.NON_POSITIVE:
            worst_sign = max(worst_sign, c / max(scale, 1e-300))
        elif region is superpose.SignClass.NON_NEGATIVE:
            worst_sign = max(worst_sign, -c / max(scale, 1e-300))
        else:
            worst_sign = max(worst_sign, abs(c) / max(scale, 1e-300))

        # isometry: random rotation + translation applied to poles and x
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        shift = rng.uniform(-1, 1, n)
        ps_iso = superpose.PoleSet(
            ps.weights, ps.locations @ q.T + shift, ps.params
        )
        c_iso = superpose.delta_p_closed_form(ps_iso, q @ x + shift)
        worst_iso = max(worst_iso, _rel(c_iso, c, scale))

        # weight scaling: a -> s a multiplies the closed form by s^(p-1)
        s = float(rng.uniform(0.5, 3.0))
        ps_s = superpose.PoleSet(s * ps.weights, ps.locations, ps.params)
        c_s = superpose.delta_p_closed_form(ps_s, x)
        worst_scal = max(worst_scal, _rel(c_s, s ** (p - 1) * c, s ** (p - 1) * scale))

        single = superpose.PoleSet(
            ps.weights[:1], ps.locations[:1], ps.params
        )
        worst_null = max(worst_null, abs(superpose.delta_p_closed_form(single, x)))
    rep.add("three_way_direct_vs_closed", worst_dc, 1e-10)
    rep.add("three_way_fd_vs_closed", worst_fd, 1e-4)
    rep.add("sign_soundness", worst_sign, 1e-12)
    rep.add("isometry_equivariance", worst_iso, 1e-12)
    rep.add("weight_scaling", worst_scal, 1e-11)
    rep.add("single_pole_nullity", worst_null, 0.0)
    return rep


def _random_nsd(rng, n):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = -rng.uniform(0.0, 3.0, n)
    return (q * lam) @ q.T


def verify_concave(seed=DEFAULT_SEED, trials=100) -> SuiteReport:
    rng = np.random.default_rng(seed)
    rep = SuiteReport("concave")

    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        p = float(rng.uniform(2.01, 6.0))
        h = _random_nsd(rng, n)
        if not concave.eigenvalue_criterion(h, p):
            worst = max(worst, concave.criterion_sum(h, p))
    rep.add("concavity_implies_criterion", worst, 1e-12)

    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        p = float(rng.uniform(2.01, 6.0))
        h = (lambda a: 0.5 * (a + a.T))(rng.standard_normal((n, n)))
        if not concave.eigenvalue_criterion(h, p):
            continue
        term = concave.QuadraticTerm(h)
        for _ in range(10):
            xi = rng.standard_normal(n)
            worst = max(worst, concave.operator_term(term, p, xi, np.zeros(n)))
    rep.add("criterion_implies_sign", worst, 1e-12)

    worst = 0.0
    for _ in range(trials):
        p = float(rng.choice([2.5, 3.0, 4.0]))
        n = int(rng.choice([2, 3]))
        ps = _random_pole_set(rng, p, n, max_poles=5)
        k = concave.QuadraticTerm(
            _random_nsd(rng, n), b=rng.uniform(-1, 1, n), c0=float(rng.uniform(-1, 1))
        )
        for _ in range(5):
            x = _random_point_away(rng, ps)
            worst = max(worst, superpose.delta_p_direct(ps, k, x))
    rep.add("concave_superposition_sign", worst, 1e-10)

    base = concave.AffineMinTerm(
        [[1.0, 0.5], [-0.7, 0.2], [0.1, -1.0]], [0.0, 0.3, -0.2]
    )
    box = [
        np.array([a, b])
        for a in np.linspace(-1, 1, 7)
        for b in np.linspace(-1, 1, 7)
    ]
    sups = []
    for delta in (0.4, 0.2, 0.1):
        mol = concave.MollifiedTerm(base, delta)
        sups.append(max(abs(mol.value(x) - base.value(x)) for x in box))
    # locally uniform convergence: sup distance must shrink as delta halves
    worst = max(sups[i + 1] / sups[i] for i in range(len(sups) - 1))
    rep.add("mollification_sup_shrinks", worst, 0.99)

    worst = 0.0
    mol = concave.MollifiedTerm(concave.QuadraticTerm(_random_nsd(rng, 2)), 0.2)
    for x in box[::5]:
        _, _, h = mol.eval(x)
        worst = max(worst, float(np.linalg.eigvalsh(h)[-1]))
    rep.add("mollified_hessian_nsd", worst, 1e-10)
    return rep


def verify_comparison(seed=DEFAULT_SEED, configs=5, nodes=33) -> SuiteReport:
    rng = np.random.default_rng(seed)
    rep = SuiteReport("comparison")
    dom = comparison.GridDomain(bounds=[(-1, 1), (-1, 1)], shape=(nodes, nodes))
    spacing = max(dom.spacing)
    tol = comparison.COMPARISON_TOL * (spacing / (1 / 32)) ** 2

    worst_mp = 0.0
    nodes_xy = dom.nodes()
    for p in (2.0, 3.0, 4.0):
        data = np.sin(2 * nodes_xy[..., 0]) + 0.5 * np.cos(3 * nodes_xy[..., 1])
        sol = comparison.solve_p_harmonic(dom, data, p)
        bmask = dom.boundary_mask()
        lo, hi = data[bmask].min(), data[bmask].max()
        worst_mp = max(
            worst_mp,
            float(np.max(sol.values) - hi),
            float(lo - np.min(sol.values)),
        )
    rep.add("discrete_maximum_principle", worst_mp, 1e-9)

    worst = 0.0
    refine_pair = None
    for i in range(configs):
        p = float(rng.choice([2.5, 3.0, 4.0]))
        params = Params(p, 2, 1.0)
        count = int(rng.integers(1, 4))
        ps = superpose.PoleSet(
            rng.uniform(0.3, 1.5, count), rng.uniform(-0.5, 0.5, (count, 2)), params
        )
        k = concave.QuadraticTerm(_random_nsd(rng, 2), b=rng.uniform(-0.5, 0.5, 2))
        report = comparison.comparison_check(ps, k, dom, tol=tol)
        worst = max(worst, -report.min_gap)
        if i == 0:
            coarse = comparison.GridDomain(
                bounds=dom.bounds, shape=tuple((m - 1) // 2 + 1 for m in dom.shape)
            )
            rep_coarse = comparison.comparison_check(ps, k, coarse, tol=4 * tol)
            refine_pair = (max(0.0, -rep_coarse.min_gap), max(0.0, -report.min_gap))
    rep.add("comparison_principle", worst, tol)
    # violations must not grow under refinement
    rep.add(
        "refinement_no_persistent_violation",
        refine_pair[1] - max(refine_pair[0], tol),
        0.0,
    )
    return rep


def verify_evolution(seed=DEFAULT_SEED, samples=50) -> SuiteReport:
    from scipy.optimize import brentq

    rng = np.random.default_rng(seed)
    rep = SuiteReport("evolution")

    worst = 0.0
    kw = evolution.EvolutionKernel(evolution.HOMOGENEOUS, Params(3.0, 2, 1.0))
    for _ in range(20):
        y = rng.uniform(-1, 1, 2)
        if np.linalg.norm(y) < 0.1:
            continue
        t = float(rng.uniform(0.2, 5.0))
        g = evolution.two_bump_gradient(kw, y, np.zeros(2), t)
        worst = max(worst, float(np.abs(g).max()))
    rep.add("two_bump_gradient_symmetry", worst, 1e-14)

    worst = 0.0
    for p, n, big_c, t in ((3.0, 2, 1.0, 1.0), (4.0, 3, 2.0, 0.5)):
        kb = evolution.EvolutionKernel(
            evolution.BARENBLATT, Params(p, n, 1.0), big_c=big_c
        )
        radius = evolution.sign_change_radius(kb, t)
        support = evolution.support_radius(kb, t)
        count = 0
        while count < samples:
            r = float(rng.uniform(0.15 * support, 0.9 * support))
            if abs(r - radius) < 0.05 * support:
                continue
            x = np.zeros(n)
            x[0] = r
            a = float(rng.choice([0.5, 2.0]))
            lhs = evolution.barenblatt_defect_fd(kb, a, x, t)
            rhs = evolution.barenblatt_defect(kb, a, x, t)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
            count += 1
    rep.add("barenblatt_defect_identity", worst, 1e-3)

    worst = 0.0
    for p, n, big_c, t in ((3.0, 2, 1.0, 1.0), (4.0, 3, 2.0, 0.5)):
        kb = evolution.EvolutionKernel(
            evolution.BARENBLATT, Params(p, n, 1.0), big_c=big_c
        )
        radius = evolution.sign_change_radius(kb, t)
        support = evolution.support_radius(kb, t)

        def bt_fd(r):
            x = np.zeros(n)
            x[0] = r
            dt = 1e-6 * t
            return (
                evolution.kernel_value(kb, x, t + dt)
                - evolution.kernel_value(kb, x, t - dt)
            ) / (2 * dt)

        bracketed = brentq(bt_fd, 0.5 * radius, min(1.5 * radius, 0.98 * support))
        worst = max(worst, abs(bracketed - radius) / radius)
    rep.add("sign_change_radius_bracketing", worst, 0.01)

    worst = 0.0
    kb = evolution.EvolutionKernel(evolution.BARENBLATT, Params(3.0, 2, 1.0))
    t = 1.0
    support = evolution.support_radius(kb, t)
    step = 1e-8
    r = support
    inside = evolution.kernel_value(kb, [r - step, 0.0], t)
    outside = evolution.kernel_value(kb, [r + step, 0.0], t)
    worst = 0.0 if (inside > 0.0 and outside == 0.0) else 1.0
    rep.add("support_radius_consistent", worst, 0.0)
    return rep


def run_suite(name, seed=DEFAULT_SEED):
    """Run one named suite (or 'all'); returns a list of SuiteReport."""
    runners = {
        "superpose": verify_superpose,
        "concave": verify_concave,
        "comparison": verify_comparison,
        "evolution": verify_evolution,
    }
    if name == "all":
        return [runners[s](seed) for s in SUITE_NAMES]
    if name not in runners:
        raise KeyError(name)
    return [runners[name](seed)]
