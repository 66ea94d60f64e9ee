"""Command-line surface: rule, converge, report, table3, check.

Exit codes: 0 success, 1 check failed, 2 usage/validation, 3 numeric or
internal failure.  Standard output is byte-deterministic for identical
invocations; diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .average import (
    ResolutionError,
    average_kernel,
    population_average_oracle,
    pre_exponential_factor,
)
from .extrapolate import default_window, full_report
from .kernels import builtin_kernel, eval_kernel, parse_kernel
from .rules import default_cache_dir, format_float, load_or_compute_rule
from .tensor_quad import convergence_series

_BUILTIN_IDS = ("FM", "CR", "SC", "SD")
_CHECK_U = (0.5, 1.0, 2.0)
_ORACLE_RTOL = 1e-5


def _resolve_kernel(text: str):
    if text.strip().upper() in _BUILTIN_IDS:
        return builtin_kernel(text)
    return parse_kernel(text)


def _parse_window(text: str, k_max: int):
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"fit window must be A:B, got {text!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"fit window must be two integers A:B, got {text!r}") from None
    if not (1 <= a < b <= k_max - 1):
        raise ValueError(f"fit window {a}:{b} not inside 1:{k_max - 1}")
    return (a, b)


def _emit(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _q_fraction(q: float) -> str:
    frac = Fraction(q).limit_denominator(48)
    if abs(float(frac) - q) < 1e-12:
        return f"{frac.numerator}/{frac.denominator}" if frac.denominator != 1 else str(frac.numerator)
    return repr(q)


def _beta_display(p: float, q: float) -> str:
    if q == 0.0:
        return f"{p:.4f}"
    if q == 1.0:
        return f"{p:.4f}*u"
    return f"{p:.4f}*u^({_q_fraction(q)})"


def _warn_asymmetry(spec) -> None:
    if spec.symmetry_warning is not None:
        print(f"avgkernel: warning: kernel {spec.label!r} {spec.symmetry_warning}",
              file=sys.stderr)


def _report_fields(report):
    """(status, C, R, II-string) shared by converge/report output."""
    q = report.final_value
    if report.exact:
        return "exact", None, 0.0, f"{q:.4f} ± 0.0000"
    est = report.estimate
    if est.remainder is None:
        return "divergent", est.slope, None, "no estimate"
    return "estimated", est.slope, est.remainder, f"{q:.4f} ± {est.remainder:.4f}"


def cmd_rule(args, cache_dir) -> int:
    if args.points < 1:
        print("avgkernel: --points must be >= 1", file=sys.stderr)
        return 2
    rule = load_or_compute_rule(args.points, cache_dir)
    if args.format == "json":
        _emit(json.dumps({
            "order": rule.order,
            "nodes": [float(x) for x in rule.nodes],
            "weights": [float(w) for w in rule.weights],
        }))
        return 0
    for i, (x, w) in enumerate(zip(rule.nodes, rule.weights), start=1):
        _emit(f"{i},{format_float(x)},{format_float(w)}")
    return 0


def cmd_converge(args, cache_dir) -> int:
    if args.max_points < 2:
        print("avgkernel: --max-points must be >= 2", file=sys.stderr)
        return 2
    spec = _resolve_kernel(args.kernel)
    _warn_asymmetry(spec)
    k_max = args.max_points
    window = _parse_window(args.fit_window, k_max) if args.fit_window else None
    series = convergence_series(lambda x, y: eval_kernel(spec, x, y),
                                k_max, cache_dir, spec.label)
    eps = [abs(series.values[n] - series.values[n - 1]) for n in range(1, k_max)]
    report = None
    if k_max >= 20:
        report = full_report(series, window)

    if args.format == "json":
        payload = {
            "kernel": spec.label,
            "k_max": k_max,
            "orders": series.orders,
            "values": series.values,
            "errors": eps,
        }
        if report is None:
            payload["status"] = "short"
        else:
            status, slope, remainder, ii = _report_fields(report)
            payload.update({
                "status": status,
                "C": slope,
                "R": remainder,
                "Q": report.final_value,
                "fit_window": list(window or default_window(k_max)),
                "II": ii,
            })
        _emit(json.dumps(payload))
        return 0

    for k in series.orders:
        e = format_float(eps[k - 1]) if k < k_max else ""
        _emit(f"{k},{format_float(series.values[k - 1])},{e}")
    if report is None:
        _emit("# series too short for a remainder fit (need >= 20 orders)")
        return 0
    status, slope, remainder, ii = _report_fields(report)
    a, b = window or default_window(k_max)
    if status == "exact":
        _emit("# converged exactly, R = 0")
    elif status == "divergent":
        _emit(f"# C = {format_float(slope)} (fit window {a}:{b})")
        _emit("# R = no estimate (C >= -1)")
    else:
        _emit(f"# C = {format_float(slope)} (fit window {a}:{b})")
        _emit(f"# R = {format_float(remainder)}")
    _emit(f"# II = {ii}")
    return 0


def cmd_report(args, cache_dir) -> int:
    if args.max_points < 20:
        print("avgkernel: --max-points must be >= 20 for report", file=sys.stderr)
        return 2
    spec = _resolve_kernel(args.kernel)
    _warn_asymmetry(spec)
    k_max = args.max_points
    window = _parse_window(args.fit_window, k_max) if args.fit_window else None
    series = convergence_series(lambda x, y: eval_kernel(spec, x, y),
                                k_max, cache_dir, spec.label)
    report = full_report(series, window)
    status, slope, remainder, ii = _report_fields(report)
    p = report.final_value / 2.0
    q = spec.degree_q
    beta = _beta_display(p, q)
    eps_anchor = "" if report.exact else format_float(report.estimate.anchor_error)

    if args.format == "json":
        _emit(json.dumps({
            "kernel": spec.label,
            "k_max": k_max,
            "Q": report.final_value,
            "eps": None if report.exact else report.estimate.anchor_error,
            "C": slope,
            "R": remainder,
            "p": p,
            "q": q,
            "beta_bar": beta,
            "status": status,
            "fit_window": list(window or default_window(k_max)),
            "II": ii,
        }))
        return 0

    _emit("# columns: kernel,Q,eps_n,C,R,p,q,beta_bar")
    c_text = "" if slope is None else format_float(slope)
    r_text = "" if remainder is None else format_float(remainder)
    _emit(f"{spec.label},{format_float(report.final_value)},{eps_anchor},"
          f"{c_text},{r_text},{format_float(p)},{format_float(q)},{beta}")
    _emit(f"# II = {ii}")
    return 0


def cmd_table3(args, cache_dir) -> int:
    if args.max_points < 20:
        print("avgkernel: --max-points must be >= 20 for table3", file=sys.stderr)
        return 2
    k_max = args.max_points
    rows = []
    if args.format == "csv":
        _emit("# columns: type,p,q,beta_bar")
    try:
        for kernel_id in _BUILTIN_IDS:
            spec = builtin_kernel(kernel_id)
            result = pre_exponential_factor(spec, k_max, cache_dir)
            beta = _beta_display(result.p, result.q)
            if args.format == "csv":
                _emit(f"{kernel_id},{format_float(result.p)},"
                      f"{format_float(result.q)},{beta}")
            else:
                rows.append({"type": kernel_id, "p": result.p,
                             "q": result.q, "beta_bar": beta})
    except (ArithmeticError, RuntimeError) as exc:
        # completed rows are already on stdout in csv mode
        print(f"avgkernel: {exc}", file=sys.stderr)
        return 3
    if args.format == "json":
        _emit(json.dumps({"k_max": k_max, "rows": rows}))
    return 0


def cmd_check(args, cache_dir) -> int:
    if args.max_points < 20:
        print("avgkernel: --max-points must be >= 20 for check", file=sys.stderr)
        return 2
    spec = _resolve_kernel(args.kernel)
    _warn_asymmetry(spec)
    result = pre_exponential_factor(spec, args.max_points, cache_dir)
    rem = result.remainder_value
    us, betas, oracles, deltas, tols = [], [], [], [], []
    for u in _CHECK_U:
        oracle = population_average_oracle(spec, u, rtol=_ORACLE_RTOL)
        beta = average_kernel(result, u)
        delta = abs(oracle - beta)
        tol = _ORACLE_RTOL * max(1.0, abs(oracle))
        if rem is not None:
            tol = max(tol, 2.0 * rem * u ** result.q)
        us.append(u)
        betas.append(beta)
        oracles.append(oracle)
        deltas.append(delta)
        tols.append(tol)
    passed = all(d <= t for d, t in zip(deltas, tols))

    if args.format == "json":
        _emit(json.dumps({
            "kernel": spec.label,
            "k_max": args.max_points,
            "u": us,
            "beta_bar": betas,
            "oracle": oracles,
            "delta": deltas,
            "tol": tols,
            "passed": passed,
        }))
        return 0 if passed else 1

    _emit("# columns: u,beta_bar,oracle,delta,tol")
    for u, beta, oracle, delta, tol in zip(us, betas, oracles, deltas, tols):
        _emit(f"{u:g},{format_float(beta)},{format_float(oracle)},"
              f"{format_float(delta)},{format_float(tol)}")
    _emit("# check passed" if passed else "# check FAILED")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avgkernel",
        description="Average coagulation kernels via Gauss-Laguerre quadrature",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, kernel=False, max_points=None):
        if kernel:
            sp.add_argument("--kernel", required=True,
                            help="builtin id (fm|cr|sc|sd) or expression")
        if max_points is not None:
            sp.add_argument("--max-points", type=int, default=max_points,
                            help=f"largest rule order (default {max_points})")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--cache-dir", default=None,
                        help="rule cache directory ('' disables;"
                             " default honors AVGKERNEL_CACHE_DIR)")

    p_rule = sub.add_parser("rule", help="print one k-point rule")
    p_rule.add_argument("--points", type=int, required=True)
    common(p_rule)
    p_rule.set_defaults(func=cmd_rule)

    p_conv = sub.add_parser("converge", help="Q_{k,k} series with remainder trailer")
    common(p_conv, kernel=True, max_points=100)
    p_conv.add_argument("--fit-window", default=None, metavar="A:B")
    p_conv.set_defaults(func=cmd_converge)

    p_rep = sub.add_parser("report", help="one-kernel summary (Q, C, R, p, q)")
    common(p_rep, kernel=True, max_points=361)
    p_rep.add_argument("--fit-window", default=None, metavar="A:B")
    p_rep.set_defaults(func=cmd_report)

    p_t3 = sub.add_parser("table3", help="p and beta_bar for the four builtins")
    common(p_t3, max_points=361)
    p_t3.set_defaults(func=cmd_table3)

    p_chk = sub.add_parser("check", help="compare against the population average")
    common(p_chk, kernel=True, max_points=361)
    p_chk.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8", newline="\n")
    parser = build_parser()
    args = parser.parse_args(argv)
    cache_dir = args.cache_dir if args.cache_dir is not None else default_cache_dir()
    try:
        return args.func(args, cache_dir)
    except ValueError as exc:
        print(f"avgkernel: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError, OSError) as exc:
        print(f"avgkernel: {exc}", file=sys.stderr)
        return 3
