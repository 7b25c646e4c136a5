"""Command-line front end.

Subcommands: eval | sign-map | verify | compare | evolution-sweep.
Configs are JSON validated against the schemas in ``schemas.py`` (unknown
keys rejected); outputs are CSV with 17 significant digits (round-trip
exact for doubles) plus JSON summaries.  Set PLAP_LOG to a logging level
name for diagnostics on stderr.
"""

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np
import jsonschema

from . import comparison, concave, evolution, superpose, verify
from .core import Params
from .errors import PlapError, SolverFailureError
from .schemas import SCHEMAS

log = logging.getLogger("plap")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _load_config(path, schema_name):
    with open(path) as fh:
        cfg = json.load(fh)
    try:
        jsonschema.validate(cfg, SCHEMAS[schema_name])
    except jsonschema.ValidationError as exc:
        print(
            f"config validation failed at {'/'.join(map(str, exc.absolute_path))}: "
            f"{exc.message}",
            file=sys.stderr,
        )
        raise SystemExit(EXIT_USAGE) from exc
    return cfg


def _params_from(cfg):
    return Params(p=float(cfg["p"]), n=int(cfg["n"]), c=float(cfg.get("c", 1.0)))


def _pole_set_from(cfg, params):
    weights = [pole["weight"] for pole in cfg["poles"]]
    locations = [pole["location"] for pole in cfg["poles"]]
    return superpose.PoleSet(weights, locations, params)


def _concave_from(term_cfg):
    if term_cfg is None:
        return None
    kind = term_cfg["kind"]
    if kind == "zero":
        return concave.ZeroTerm()
    if kind == "quadratic":
        return concave.QuadraticTerm(
            np.asarray(term_cfg["a_matrix"], dtype=float),
            b=term_cfg.get("b"),
            c0=float(term_cfg.get("c0", 0.0)),
        )
    if kind == "affine_min":
        return concave.AffineMinTerm(term_cfg["slopes"], term_cfg["offsets"])
    if kind == "mollified":
        return concave.MollifiedTerm(_concave_from(term_cfg["base"]), float(term_cfg["delta"]))
    raise SystemExit(f"unknown concave kind {kind!r}")


def cmd_eval(args):
    cfg = _load_config(args.config, "eval")
    params = _params_from(cfg["params"])
    ps = _pole_set_from(cfg, params)
    k = _concave_from(cfg.get("concave"))
    step = float(cfg.get("fd_step", superpose.DEFAULT_FD_STEP))
    pure = k is None or isinstance(k, concave.ZeroTerm)

    header = (
        [f"x{i}" for i in range(params.n)]
        + ["value", "grad_norm", "delta_p_direct", "delta_p_closed_form", "delta_p_fd", "flag"]
    )
    rows = []
    for point in cfg["points"]:
        x = np.asarray(point, dtype=float)
        dists = np.linalg.norm(x[None, :] - ps.locations, axis=1)
        if np.min(dists) <= 10 * step:
            res_val = superpose.evaluate(ps, k, x).value if np.min(dists) > 0 else None
            rows.append(
                list(x)
                + [
                    res_val if res_val is not None else float("inf"),
                    float("nan"),
                    float("nan"),
                    float("nan"),
                    float("nan"),
                    "near-pole",
                ]
            )
            continue
        res = superpose.evaluate(ps, k, x)
        direct = superpose.delta_p_direct(ps, k, x)
        closed = superpose.delta_p_closed_form(ps, x) if pure else float("nan")
        fd = superpose.delta_p_fd(ps, k, x, step=step)
        rows.append(
            list(x)
            + [res.value, float(np.linalg.norm(res.gradient)), direct, closed, fd, ""]
        )
    _write_csv(args.out, header, rows)
    log.info("wrote %d rows to %s", len(rows), args.out)
    return EXIT_OK


def cmd_sign_map(args):
    cfg = _load_config(args.config, "sign_map")
    # round to decimals so accumulated steps land exactly on the zero lines
    p_values = np.round(
        np.arange(cfg["p_min"], cfg["p_max"] + 0.5 * cfg["p_step"], cfg["p_step"]), 12
    )
    rows = []
    for p in p_values:
        for n in range(int(cfg["n_min"]), int(cfg["n_max"]) + 1):
            rows.append([float(p), n, superpose.sign_region(float(p), n).value])
    _write_csv(args.out, ["p", "n", "sign_class"], rows)
    return EXIT_OK


def cmd_verify(args):
    try:
        reports = verify.run_suite(args.suite, seed=args.seed)
    except KeyError:
        print(f"unknown suite {args.suite!r}; choose from "
              f"{', '.join(verify.SUITE_NAMES + ('all',))}", file=sys.stderr)
        return EXIT_USAGE
    payload = {
        "seed": args.seed,
        "suites": [rep.to_dict() for rep in reports],
        "passed": all(rep.passed for rep in reports),
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for rep in reports:
        for check in rep.checks:
            status = "pass" if check.passed else "FAIL"
            log.info("%s/%s: %s (worst %.3e)", rep.suite, check.name, status,
                     check.worst_residual)
    return EXIT_OK if payload["passed"] else EXIT_FAILURE


def cmd_compare(args):
    cfg = _load_config(args.config, "compare")
    params = _params_from(cfg["params"])
    ps = _pole_set_from(cfg, params)
    k = _concave_from(cfg.get("concave"))
    grid = cfg["grid"]
    dom = comparison.GridDomain(
        bounds=[tuple(b) for b in grid["bounds"]], shape=tuple(grid["shape"])
    )
    try:
        report = comparison.comparison_check(
            ps,
            k,
            dom,
            shift=float(cfg.get("shift", 0.0)),
            tol=float(cfg.get("tol", comparison.COMPARISON_TOL)),
        )
    except SolverFailureError as exc:
        print(f"solver failure: {exc} (residual {exc.residual})", file=sys.stderr)
        return EXIT_FAILURE

    nodes = dom.nodes().reshape(-1, dom.dim)
    w = report.w_values.ravel()
    h = report.h_values.ravel()
    header = [f"x{i}" for i in range(dom.dim)] + ["w", "h", "gap", "excised"]
    rows = [
        list(nodes[i]) + [w[i], h[i], w[i] - h[i], int(report.excised_mask.ravel()[i])]
        for i in range(nodes.shape[0])
    ]
    _write_csv(args.out, header, rows)
    summary = {
        "min_gap": report.min_gap,
        "violations": report.violations,
        "tolerance": report.tol,
        "excised_nodes": report.excised,
    }
    with open(args.summary, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def cmd_evolution_sweep(args):
    cfg = _load_config(args.config, "evolution_sweep")
    kcfg = cfg["kernel"]
    params = Params(p=float(kcfg["p"]), n=int(kcfg["n"]), c=1.0)
    kernel = evolution.EvolutionKernel(
        kind=kcfg["kind"],
        params=params,
        big_c=float(kcfg.get("big_c", 1.0)),
        small_c=float(kcfg.get("small_c", 1.0)),
    )
    rows = []
    if kernel.kind == evolution.BARENBLATT:
        t = float(cfg["t"])
        a = float(cfg.get("a", 2.0))
        sweep = cfg["radii"]
        radii = np.linspace(sweep["min"], sweep["max"], int(sweep["count"]))
        support = evolution.support_radius(kernel, t)
        for r in radii:
            x = np.zeros(params.n)
            x[0] = r
            if r >= support:
                rows.append([float(r), 0.0, 0.0, 0])
                continue
            bt = evolution.kernel_time_derivative(kernel, x, t)
            defect = evolution.barenblatt_defect(kernel, a, x, t)
            rows.append([float(r), bt, defect, int(np.sign(defect))])
        _write_csv(args.out, ["radius", "kernel_time_derivative", "defect", "defect_sign"], rows)
    else:
        y = np.asarray(cfg["y"], dtype=float)
        sweep = cfg["times"]
        times = np.geomspace(sweep["min"], sweep["max"], int(sweep["count"]))
        for t in times:
            wt = evolution.kernel_time_derivative(kernel, y, float(t))
            defect = evolution.two_bump_defect(kernel, y, float(t))
            rows.append([float(t), wt, defect, int(np.sign(defect))])
        _write_csv(args.out, ["t", "kernel_time_derivative", "defect", "defect_sign"], rows)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plap",
        description="Verification experiments for p-Laplacian superpositions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a configuration at query points")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=cmd_eval)

    p_map = sub.add_parser("sign-map", help="classify the (p, n) sign regions")
    p_map.add_argument("--config", required=True)
    p_map.add_argument("--out", required=True)
    p_map.set_defaults(func=cmd_sign_map)

    p_verify = sub.add_parser("verify", help="run randomized invariant suites")
    p_verify.add_argument("--suite", required=True)
    p_verify.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    p_verify.add_argument("--out")
    p_verify.set_defaults(func=cmd_verify)

    p_cmp = sub.add_parser("compare", help="discrete comparison-principle run")
    p_cmp.add_argument("--config", required=True)
    p_cmp.add_argument("--out", required=True)
    p_cmp.add_argument("--summary", required=True)
    p_cmp.set_defaults(func=cmd_compare)

    p_evo = sub.add_parser("evolution-sweep", help="defect sweep tables")
    p_evo.add_argument("--config", required=True)
    p_evo.add_argument("--out", required=True)
    p_evo.set_defaults(func=cmd_evolution_sweep)
    return parser


def main(argv=None):
    level = os.environ.get("PLAP_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
