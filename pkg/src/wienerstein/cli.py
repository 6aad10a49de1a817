"""Command line interface: ``wienerstein <subcommand> ...``.

Exit codes: 0 on success, 1 on invalid input, 2 when a numerical budget is
exhausted. Errors are reported as one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

import numpy as np

from . import baitaqqu, cumulants, discrepancy, matching, polyalg, sampling, stein_ops
from .errors import BadInput, NumericalBudgetError, UnknownSubcommand, WienerSteinError
from .spectrum import GammaMixtureSpec, Spectrum, TargetSpectrum, chaos_target_as_gamma
from .targets import BUILTIN_TARGETS, get_target
from .testfunctions import catalog


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "invalid choice" in message or "required: command" in message:
            raise UnknownSubcommand(message, field="subcommand")
        raise BadInput(message, field="arguments")


def _num(x: float) -> str:
    return repr(float(x))


def _load_json(arg: str, field: str):
    """Parse ``arg`` as inline JSON, or as the path of a JSON file."""
    text = arg.strip()
    if not text.startswith(("[", "{", '"')):
        try:
            with open(arg) as fh:
                text = fh.read()
        except OSError as exc:
            raise BadInput(f"cannot read {field} file {arg!r}: {exc.strerror}", field=field) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInput(f"{field} is not valid JSON: {exc.msg}", field=field) from exc


def _target(arg: str) -> TargetSpectrum:
    if arg in BUILTIN_TARGETS:
        return get_target(arg)
    return TargetSpectrum.from_json(_load_json(arg, "target"))


def _spectrum(arg: str) -> Spectrum:
    return Spectrum.from_json(_load_json(arg, "spectrum"))


def _law(arg: str):
    """A Gamma mixture, a built-in target name, or a spectrum."""
    if arg in BUILTIN_TARGETS:
        return get_target(arg)
    obj = _load_json(arg, "law")
    if isinstance(obj, dict) and "gamma_mixture" in obj:
        return GammaMixtureSpec.from_json(obj)
    return Spectrum.from_json(obj)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else _num(v) if isinstance(v, float)
                           else str(v) for v in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _int_list(text: str, field: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise BadInput(f"{field} must be a comma separated list of integers", field=field) from exc


def _float_list(text: str, field: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise BadInput(f"{field} must be a comma separated list of numbers", field=field) from exc


def _check_run(args):
    if args.seed < 0 or args.seed >= 2 ** 64:
        raise BadInput("seed must be a 64-bit unsigned integer", field="seed")
    if args.samples < 1000:
        raise BadInput("samples must be at least 1000", field="samples")
    if args.replicates < 1:
        raise BadInput("replicates must be positive", field="replicates")
    if args.workers < 1:
        raise BadInput("workers must be positive", field="workers")


# subcommands: each validates its inputs, computes, and returns the output text


def cmd_poly(args):
    t = _target(args.target)
    p, q = polyalg.p_polynomial(t), polyalg.q_polynomial(t)
    return _json({"P": list(p.coeffs), "Q": list(q.coeffs),
                  "theta": {str(r): v for r, v in polyalg.theta(t).items()}})


def cmd_cumulants(args):
    s = _spectrum(args.spectrum)
    R = args.order
    exact = cumulants.exact_cumulants(s, R)
    out = {"exact": {str(r): exact[r] for r in range(2, R + 1)}}
    if args.empirical:
        _check_run(args)
        x = sampling.sample_chaos(s, args.samples, args.seed, args.workers).values
        emp = cumulants.empirical_cumulants(x, R, seed=args.seed)
        out["empirical"] = {str(r): emp[r] for r in range(2, R + 1)}
        out["stderr"] = {str(r): e for r, e in zip(range(2, R + 1), emp.stderr)}
        out["samples"] = args.samples
        out["seed"] = args.seed
    return _json(out)


def cmd_delta(args):
    s, t = _spectrum(args.spectrum), _target(args.target)
    return _json(discrepancy.delta(s, t).to_json())


def _operator_law(args):
    if args.gamma_mixture:
        return GammaMixtureSpec.from_json(_load_json(args.gamma_mixture, "gamma_mixture")), None
    if not args.target:
        raise BadInput("give --target or --gamma-mixture", field="target")
    t = _target(args.target)
    return chaos_target_as_gamma(t, [1] * t.q), t


def cmd_stein_op(args):
    spec, t = _operator_law(args)
    if args.form == "malliavin":
        if t is None:
            raise BadInput("the cumulant form needs --target", field="form")
        op = stein_ops.build_malliavin_operator(t)
    else:
        op = stein_ops.build_gamma_mixture_operator(spec)
    if args.format == "latex":
        return op.to_latex() + "\n"
    return _json(op.to_json())


def cmd_stein_check(args):
    _check_run(args)
    spec, t = _operator_law(args)
    law = t if t is not None else spec
    if args.form == "malliavin" and t is not None:
        op = stein_ops.build_malliavin_operator(t)
    else:
        op = stein_ops.build_gamma_mixture_operator(spec)
    rows = stein_ops.mc_characterization_residual(op, law, catalog(), args.samples, args.seed,
                                                  args.workers)
    return _csv(["function", "mean", "stderr", "z"],
                [(r.function, r.mean, r.stderr, r.z) for r in rows])


def cmd_cf_check(args):
    spec, _ = _operator_law(args)
    if not 0 < args.xi_max <= 50:
        raise BadInput("xi-max must lie in (0, 50]", field="xi_max")
    grid = np.linspace(-args.xi_max, args.xi_max, args.points)
    res = stein_ops.cf_ode_residual(spec, grid)
    return _json({"max_relative_residual": res, "points": args.points, "xi_max": args.xi_max})


def cmd_wasserstein(args):
    _check_run(args)
    a, b = _law(args.law_a), _law(args.law_b)
    if args.replicates < 2:
        raise BadInput("need at least 2 replicates", field="replicates")
    est = sampling.estimate_wasserstein(a, b, args.p, args.samples, args.replicates, args.seed,
                                        args.workers, args.common)
    rows = [(str(r), v) for r, v in enumerate(est.replicates)]
    rows.append(("mean", est.point))
    rows.append(("stderr", est.stderr))
    return _csv(["replicate", f"w{args.p}"], rows)


def _family(arg: str, t: TargetSpectrum):
    obj = _load_json(arg, "family")
    if isinstance(obj, dict) and "deltas" in obj:
        return sampling.perturbation_family(t, [float(d) for d in obj["deltas"]])
    members = obj.get("members") if isinstance(obj, dict) else obj
    if not isinstance(members, list) or not members:
        raise BadInput("family needs a nonempty 'members' list or a 'deltas' list", field="family")
    out = []
    for i, m in enumerate(members):
        if not isinstance(m, dict) or "coeffs" not in m:
            raise BadInput(f"family member {i} needs 'coeffs'", field="family")
        out.append((float(m.get("param", i)), Spectrum(tuple(m["coeffs"]), t.base_law)))
    return out


def cmd_bound_sweep(args):
    _check_run(args)
    t = _target(args.target)
    fam = _family(args.family, t)
    cfg = sampling.BoundConfig(args.samples, args.replicates, args.seed, args.workers, args.p,
                               args.common)
    if cfg.replicates < 2:
        raise BadInput("need at least 2 replicates", field="replicates")
    rows = sampling.bound_experiment(fam, t, cfg)
    return _csv(["param", "delta", "w2", "ratio", "stderr"],
                [(r.param, r.delta, r.w2, r.ratio, r.stderr) for r in rows])


def cmd_match(args):
    s, t = _spectrum(args.spectrum), _target(args.target)
    return _json(matching.match(s, t).to_json())


def cmd_thresholds(args):
    t = _target(args.target)
    out = matching.thresholds(t).to_json()
    out["independence_hint"] = matching.rational_independence_hint(t).to_json()
    return _json(out)


def cmd_bai_taqqu(args):
    if not 0 < args.tol < 1:
        raise BadInput("tol must lie in (0, 1)", field="tol")
    if args.max_subintervals < 1:
        raise BadInput("max-subintervals must be positive", field="max_subintervals")
    orders = _int_list(args.orders, "orders")
    if any(m not in (2, 3, 4) for m in orders):
        raise BadInput("orders must be among 2, 3, 4", field="orders")
    grid = _float_list(args.gamma1_grid, "gamma1_grid") if args.gamma1_grid \
        else baitaqqu.default_grid()
    for g in grid:
        baitaqqu.RosenblattParams(g, args.rho)
    res = baitaqqu.rate_experiment(args.rho, grid, orders,
                                   baitaqqu.IntegrationConfig(args.tol, args.max_subintervals))
    if args.format == "json":
        return _json({"rows": [r.__dict__ for r in res.rows],
                      "slopes": {str(m): v for m, v in res.slopes.items()}})
    return _csv(["gamma1", "m", "kappa_z", "kappa_y", "gap", "error"],
                [(r.gamma1, r.m, r.kappa_z, r.kappa_y, r.gap, r.error) for r in res.rows])


def _selftest_cases():
    from fractions import Fraction

    def golden_ops():
        lam, q = 0.3, 4
        op = stein_ops.build_gamma_mixture_operator(
            GammaMixtureSpec.from_arrays([lam], [q], [0.5], [0.5]))
        ok1 = op.coeffs == ((0.0, 1.0), (-2 * lam * q * lam, -2 * lam))
        op = stein_ops.build_gamma_mixture_operator(chaos_target_as_gamma((0.5, -0.5), [1, 1]))
        ok2 = op.coeffs == ((0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))
        return ok1 and ok2

    def thresholds_case():
        th = matching.thresholds(TargetSpectrum((0.5, -0.5)))
        return (th.theta2 == 1 / 16 and abs(th.lower_bound - 1 / 48) < 1e-15
                and th.vartheta == 0.25 and th.varkappa == -0.25 and th.L == 3)

    def zero_delta():
        t = TargetSpectrum((0.5, -0.5))
        return (discrepancy.delta_product(t.as_spectrum(), t) == 0.0
                and discrepancy.delta_product(Spectrum((0.5, 0.5)), t) == 0.0)

    def nonconvergent_gap():
        rep = matching.match(Spectrum((0.5, 0.5)), TargetSpectrum((0.5, -0.5)))
        return rep.status == matching.MULTIPLICITY_AMBIGUOUS and rep.cumulant_gaps[1] == 2.0

    def vandermonde_ones():
        t = BUILTIN_TARGETS["three_point"]
        v = polyalg.vandermonde_solve(polyalg.VandermondeSystem(
            t.coeffs, [t.power_sum(r) for r in range(2, t.q + 2)]))
        return tuple(int(round(x)) for x in v) == (1,) * t.q

    def product_normal_cumulants():
        s = Spectrum((0.5, -0.5))
        k = cumulants.exact_cumulants(s, 4)
        return (Fraction(k[2]) == 1 and k[3] == 0.0 and k[4] == 6.0)

    def y_rho_variance():
        return abs(baitaqqu.y_rho(0.5).cumulant(2) - 1.0) < 1e-12

    return [("golden_operators", golden_ops), ("thresholds_product_normal", thresholds_case),
            ("zero_discrepancy_cases", zero_delta), ("non_convergent_example", nonconvergent_gap),
            ("vandermonde_all_ones", vandermonde_ones),
            ("product_normal_cumulants", product_normal_cumulants),
            ("y_rho_unit_variance", y_rho_variance)]


def cmd_selftest(args):
    lines, failed = [], 0
    for name, fn in _selftest_cases():
        try:
            ok = bool(fn())
        except WienerSteinError:
            ok = False
        failed += not ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}")
    args._exit = 1 if failed else 0
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wienerstein",
                     description="Stein discrepancies and limit laws in the second Wiener chaos")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=1_000_000)
        p.add_argument("--replicates", type=int, default=20)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--format", choices=("json", "csv", "latex"), default=None)
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        return p

    p = add("poly", cmd_poly, "P, Q and Theta coefficients of a target")
    p.add_argument("--target", required=True)
    p = add("cumulants", cmd_cumulants, "exact (and optionally empirical) cumulants")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--empirical", action="store_true")
    p = add("delta", cmd_delta, "discrepancy report")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--target", required=True)
    for name, fn, help_ in (("stein-op", cmd_stein_op, "print an operator"),
                            ("stein-check", cmd_stein_check, "Monte Carlo characterisation table"),
                            ("cf-check", cmd_cf_check, "characteristic function ODE residual")):
        p = add(name, fn, help_)
        p.add_argument("--target")
        p.add_argument("--gamma-mixture")
        p.add_argument("--form", choices=("fourier", "malliavin"), default="fourier")
        if name == "cf-check":
            p.add_argument("--xi-max", type=float, default=10.0)
            p.add_argument("--points", type=int, default=200)
    p = add("wasserstein", cmd_wasserstein, "replicated empirical Wasserstein distance")
    p.add_argument("--law-a", required=True)
    p.add_argument("--law-b", required=True)
    p.add_argument("--p", type=int, choices=(1, 2), default=2)
    p.add_argument("--common", action="store_true", help="share Gaussians between both sides")
    p = add("bound-sweep", cmd_bound_sweep, "W2 against sqrt(Delta) along a family")
    p.add_argument("--family", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--p", type=int, choices=(1, 2), default=2)
    p.add_argument("--common", action="store_true")
    p = add("match", cmd_match, "match a spectrum against a target")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--target", required=True)
    p = add("thresholds", cmd_thresholds, "target thresholds")
    p.add_argument("--target", required=True)
    p = add("bai-taqqu", cmd_bai_taqqu, "cumulant rate experiment")
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--gamma1-grid", default=None)
    p.add_argument("--orders", default="2,3")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-subintervals", type=int, default=200)
    add("selftest", cmd_selftest, "golden example suite")
    return parser


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        text = args.func(args)
        _write(text, args.out)
        return getattr(args, "_exit", 0)
    except BadInput as exc:
        err = {"error": type(exc).__name__, "field": getattr(exc, "field", None),
               "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return 1
    except NumericalBudgetError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        est = getattr(exc, "error_estimate", None) or getattr(exc, "condition", None)
        if est is not None and math.isfinite(est):
            err["estimate"] = est
        sys.stderr.write(json.dumps(err) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
