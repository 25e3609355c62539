"""Command-line driver: benchmark protocols, critical points, descent, validation.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
All outputs are deterministic for a given seed; repeated invocations with
identical arguments produce byte-identical files.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .critpoints import (
    DescentMode,
    ScalarQuadratic,
    check_refai_bound,
    example_quadratic_critical_points,
    flms1_critical_points,
    flms2_critical_sequence,
    fractional_descent_scalar,
)
from .fracderiv import PowerFunction, gamma, rl_deriv_numeric, rl_deriv_power_left
from .filters import AlgorithmSpec, FilterState, UpdateRule, step
from .harness import (
    PAPER_ALPHAS,
    ProtocolId,
    _atomic_write,
    paper_protocol,
    run_experiment,
    write_results_csv,
    write_run_metadata,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3

# test-only hook: set to a property name to force that check to fail
_FAULT_ENV = "FRACLMS_VALIDATE_FAULT"


def _parse_alphas(text: str):
    try:
        alphas = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list: {text!r}")
    if not alphas or not all(0.0 < a <= 1.0 for a in alphas):
        raise argparse.ArgumentTypeError("alphas must lie in (0, 1]")
    return alphas


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraclms", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("run-protocol", help="run a benchmark protocol, write CSV + JSON")
    rp.add_argument("protocol", choices=[p.value for p in ProtocolId])
    rp.add_argument("--rounds", type=int, default=100)
    rp.add_argument("--iterations", type=int, default=1000)
    rp.add_argument("--seed", type=int, default=2021)
    rp.add_argument("--alphas", type=_parse_alphas, default=PAPER_ALPHAS)
    rp.add_argument("--snr", type=float, default=10.0)
    rp.add_argument(
        "--paper-scale", action="store_true", help="full benchmark scale (1000 rounds)"
    )
    rp.add_argument("--out", default=".")
    rp.add_argument("--force", action="store_true")

    cp = sub.add_parser("critical-points", help="fractional critical-point sweep, write CSV")
    cp.add_argument("--d", type=float, default=1.0)
    cp.add_argument("--x", type=float, default=1.0)
    cp.add_argument("--c", type=float, default=0.0)
    cp.add_argument("--a", type=float, default=0.0)
    cp.add_argument("--w-prev", type=float, default=0.0)
    cp.add_argument("--alphas", type=_parse_alphas, default=PAPER_ALPHAS)
    cp.add_argument("--out", default=".")
    cp.add_argument("--force", action="store_true")

    de = sub.add_parser("descent", help="scalar fractional descent trajectory, write CSV")
    de.add_argument("--objective", choices=["example1", "example2"], default="example2")
    de.add_argument("--mode", choices=["rule1", "rule2"], default="rule2")
    de.add_argument("--mu-f", type=float, default=0.1)
    de.add_argument("--alpha", type=float, default=0.9)
    de.add_argument("--t0", type=float, default=0.5)
    de.add_argument("--t-prev0", type=float, default=0.4)
    de.add_argument("--steps", type=int, default=10000)
    de.add_argument("--c", type=float, default=0.0, help="additive constant for example1")
    de.add_argument("--raw", action="store_true", help="disable the modulus remedy")
    de.add_argument("--out", default=".")
    de.add_argument("--force", action="store_true")

    sub.add_parser("validate", help="run the fast invariant suite")
    return parser


def _prepare_outputs(out_dir: str, names, force: bool):
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return None
    paths = [os.path.join(out_dir, name) for name in names]
    if not force:
        existing = [p for p in paths if os.path.exists(p)]
        if existing:
            print(
                f"error: refusing to overwrite {', '.join(existing)} (use --force)",
                file=sys.stderr,
            )
            return None
    return paths


def _cmd_run_protocol(args) -> int:
    rounds = 1000 if args.paper_scale else args.rounds
    if rounds < 1 or args.iterations < 1:
        print("error: rounds and iterations must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    protocol = ProtocolId(args.protocol)
    paths = _prepare_outputs(
        args.out, [f"protocol_{protocol.value}.csv", f"protocol_{protocol.value}.json"], args.force
    )
    if paths is None:
        return EXIT_IO
    csv_path, json_path = paths
    variants = paper_protocol(
        protocol,
        rounds=rounds,
        iterations=args.iterations,
        master_seed=args.seed,
        alphas=args.alphas,
        snr_db=args.snr,
    )
    labelled = []
    for variant, config in variants:
        label = f"{protocol.value}:{variant}"
        curves = run_experiment(config)
        labelled.append((label, curves))
        for curve in curves:
            print(
                f"{label} {curve.meta['algorithm']} alpha={curve.meta['alpha']:g} "
                f"final_md={curve.md[-1]:.6g} complex_fire_rate={curve.complex_fire_rate:.3f}"
            )
    try:
        write_results_csv(csv_path, labelled)
        write_run_metadata(json_path, [(f"{protocol.value}:{v}", c) for v, c in variants])
    except OSError as exc:
        print(f"error: writing results failed: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def _mse_residual(d: float, x: float, root: float, alpha: float) -> float:
    if root <= 0.0 or alpha == 1.0:
        return math.nan
    return abs(rl_deriv_numeric(alpha, lambda w: (d - w * x) ** 2, (0.0, root)))


def _cmd_critical_points(args) -> int:
    if args.x == 0.0:
        print("error: x must be non-zero", file=sys.stderr)
        return EXIT_USAGE
    if not 0.0 <= args.a < 0.25:
        print("error: lower terminal a must lie in [0, 1/4)", file=sys.stderr)
        return EXIT_USAGE
    paths = _prepare_outputs(args.out, ["critical_points.csv"], args.force)
    if paths is None:
        return EXIT_IO
    lines = ["family,alpha,root_plus,root_minus,residual_plus,residual_minus,imaginary"]
    for alpha in args.alphas:
        hi, lo = flms1_critical_points(args.d, args.x, alpha)
        res_hi = _mse_residual(args.d, args.x, hi, alpha)
        res_lo = _mse_residual(args.d, args.x, lo, alpha)
        lines.append(f"mse,{alpha!r},{hi!r},{lo!r},{res_hi!r},{res_lo!r},False")
        if alpha < 1.0:
            quad = ScalarQuadratic(2.0, -1.0, args.c, args.a)
            report = example_quadratic_critical_points(quad, alpha)
            roots = [
                repr(complex(r)) if report.imaginary else repr(float(r.real if isinstance(r, complex) else r))
                for r in report.fractional_pair
            ]
            lines.append(
                f"example,{alpha!r},{roots[0]},{roots[1]},"
                f"{report.residuals[0]!r},{report.residuals[1]!r},{report.imaginary}"
            )
        print(f"alpha={alpha:g}: mse roots ({hi:.7g}, {lo:.7g})")
    try:
        _atomic_write(paths[0], "\n".join(lines) + "\n")
    except OSError as exc:
        print(f"error: writing results failed: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {paths[0]}")
    return EXIT_OK


_OBJECTIVES = {
    "example1": lambda c: ScalarQuadratic(2.0, -1.0, c),
    "example2": lambda _c: ScalarQuadratic(4.0, -12.0, 9.0),
}


def _cmd_descent(args) -> int:
    if args.steps < 1:
        print("error: steps must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    paths = _prepare_outputs(args.out, ["descent.csv"], args.force)
    if paths is None:
        return EXIT_IO
    quad = _OBJECTIVES[args.objective](args.c)
    mode = DescentMode.RULE1_STYLE if args.mode == "rule1" else DescentMode.RULE2_STYLE
    result = fractional_descent_scalar(
        quad,
        mode,
        alpha=args.alpha,
        mu_f=args.mu_f,
        t0=args.t0,
        t_prev0=args.t_prev0,
        steps=args.steps,
        use_modulus=not args.raw,
    )
    t_star = quad.minimizer
    lines = ["n,t,abs_error"]
    for n, t in enumerate(result.trajectory):
        lines.append(f"{n},{float(t)!r},{abs(float(t) - t_star)!r}")
    try:
        _atomic_write(paths[0], "\n".join(lines) + "\n")
    except OSError as exc:
        print(f"error: writing results failed: {exc}", file=sys.stderr)
        return EXIT_IO
    final_err = abs(float(result.trajectory[-1]) - t_star)
    print(
        f"descent {args.objective} mode={args.mode} alpha={args.alpha:g}: "
        f"final |t - t*| = {final_err:.4g} (finite={result.finite})"
    )
    print(f"wrote {paths[0]}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# validation suite


def _check_gamma_recurrence() -> bool:
    fault = os.environ.get(_FAULT_ENV) == "gamma-recurrence"
    rng = np.random.default_rng(101)
    for z in rng.uniform(0.1, 19.0, 200):
        left = gamma(z + 1.0) * (1.0 + 1e-9 if fault else 1.0)
        if abs(left - z * gamma(z)) / abs(left) > 1e-12:
            return False
    return True


def _check_oracle_agreement() -> bool:
    rng = np.random.default_rng(202)
    for _ in range(20):
        a = rng.uniform(-2.0, 2.0)
        beta = rng.uniform(0.1, 3.0)
        alpha = rng.uniform(0.05, 0.95)
        if abs(beta - alpha) < 5e-2:
            continue
        t = a + rng.uniform(0.1, 5.0)
        p = PowerFunction(a, beta)
        closed = rl_deriv_power_left(alpha, p, t)
        numeric = rl_deriv_numeric(alpha, p, (a, t))
        if abs(closed - numeric) / max(abs(closed), 1e-30) > 1e-5:
            return False
    return True


def _run_pair(spec_a, spec_b, steps, seed):
    rng = np.random.default_rng(seed)
    w_true = rng.standard_normal(8)
    sa, sb = FilterState.zeros(8), FilterState.zeros(8)
    xs = rng.standard_normal(steps)
    d = np.convolve(xs, w_true)[:steps]
    worst = 0.0
    for n in range(steps):
        step(sa, float(xs[n]), float(d[n]), spec_a)
        step(sb, float(xs[n]), float(d[n]), spec_b)
        worst = max(worst, float(np.max(np.abs(sa.weights - sb.weights))))
    return worst


def _check_reduction_mu_f_zero() -> bool:
    lms = AlgorithmSpec(UpdateRule.LMS, mu_l=0.05)
    frac = AlgorithmSpec(UpdateRule.FLMS1_MOD, alpha=0.5, mu_l=0.05, mu_f=0.0)
    return _run_pair(lms, frac, 2000, 303) == 0.0


def _check_reduction_alpha_one() -> bool:
    lms = AlgorithmSpec(UpdateRule.LMS, mu_l=0.05)
    frac = AlgorithmSpec(UpdateRule.FLMS1_MOD, alpha=1.0, mu_l=0.02, mu_f=0.03)
    return _run_pair(lms, frac, 2000, 304) < 1e-12


def _check_refai_bound() -> bool:
    rng = np.random.default_rng(404)
    for _ in range(100):
        a2 = rng.uniform(0.5, 4.0)
        t_star = rng.uniform(0.05, 0.95)
        c = rng.uniform(-1.0, 1.0)
        alpha = rng.uniform(0.05, 0.95)
        quad = ScalarQuadratic(a2, -2.0 * a2 * t_star, c)
        if not check_refai_bound(quad, t_star, alpha):
            return False
    return True


def _check_root_residuals() -> bool:
    rng = np.random.default_rng(505)
    for _ in range(200):
        d = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
        x = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
        alpha = rng.uniform(0.05, 0.999)
        w_prev = rng.uniform(-2.0, 2.0)
        for root in flms1_critical_points(d, x, alpha):
            res = 2.0 * x * x * root * root - 2.0 * (2.0 - alpha) * d * x * root + (
                2.0 - alpha
            ) * (1.0 - alpha) * d * d
            if abs(res) / (2.0 * x * x) > 1e-10:
                return False
        phi = d - w_prev * x
        for root in flms2_critical_sequence(w_prev, d, x, alpha):
            rel = root - w_prev
            res = 2.0 * x * x * rel * rel - 2.0 * (2.0 - alpha) * phi * x * rel + (
                2.0 - alpha
            ) * (1.0 - alpha) * phi * phi
            if abs(res) / (2.0 * x * x) > 1e-10:
                return False
    return True


_VALIDATORS = (
    ("gamma-recurrence", _check_gamma_recurrence),
    ("oracle-agreement", _check_oracle_agreement),
    ("reduction-mu-f-zero", _check_reduction_mu_f_zero),
    ("reduction-alpha-one", _check_reduction_alpha_one),
    ("refai-bound", _check_refai_bound),
    ("critical-root-residuals", _check_root_residuals),
)


def _cmd_validate(_args) -> int:
    failed = []
    for name, check in _VALIDATORS:
        ok = check()
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failed.append(name)
    if failed:
        print(f"validation failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


_COMMANDS = {
    "run-protocol": _cmd_run_protocol,
    "critical-points": _cmd_critical_points,
    "descent": _cmd_descent,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
