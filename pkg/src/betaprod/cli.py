"""Command-line front end.

    betaprod pdf --family mms --grid 0:1:101
    betaprod coeffs --u 0.25,0.5,0.75 --v 0.8333,1,1.1667 --n 10
    betaprod verify --family mms --samples 1000000 --seed 7

Exit codes: 0 success, 1 a verification check failed, 2 bad input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from . import evaluator, oracles
from .exceptions import BetaProdError, ConvergenceError, DomainError, ValidationError
from .model import ProductSpec, mms_spec, moment, parse_uv, state_determinant_spec
from .series_origin import origin_pdf_with_error
from .series_unit import build_unit, unit_pdf_from_gap, unit_pdf_with_error

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

FIGURES = (
    ("fig1_pdf.csv", "pdf", (0.0, 1.0, 101)),
    ("fig2_cdf.csv", "cdf", (0.0, 1.0, 101)),
    ("fig3_cdf.csv", "cdf", (0.0, 0.04, 41)),
    ("fig4_survival.csv", "survival", (0.4, 1.0, 61)),
)


class UsageError(ValidationError):
    pass


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, points = text.split(":")
        start, stop, points = float(start), float(stop), int(points)
    except ValueError:
        raise UsageError(f"--grid: expected start:stop:points, got {text!r}") from None
    if not (0.0 <= start <= 1.0 and 0.0 <= stop <= 1.0) or start > stop:
        raise UsageError(f"--grid: need 0 <= start <= stop <= 1, got {text!r}")
    if points < 2:
        raise UsageError(f"--grid: need at least 2 points, got {points}")
    return np.linspace(start, stop, points)


def spec_from_args(args) -> ProductSpec:
    if args.family is not None:
        if args.u is not None or args.v is not None:
            raise UsageError("--family cannot be combined with --u/--v")
        if args.family == "mms":
            return mms_spec()
        if args.alpha is None:
            raise UsageError("--alpha is required with --family state-det")
        if not args.alpha > 0:
            raise UsageError(f"--alpha must be positive, got {args.alpha}")
        return state_determinant_spec(args.alpha)
    if args.u is None or args.v is None:
        raise UsageError("give --u and --v, or --family")
    try:
        return parse_uv(args.u, args.v)
    except ValidationError as exc:
        raise UsageError(f"--u/--v: {exc}") from None


def _crossover(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"--crossover: expected a number or 'auto', got {text!r}") from None


def model_from_args(args) -> evaluator.DensityModel:
    spec = spec_from_args(args)
    model = evaluator.build_model(spec, N=args.n, crossover=_crossover(args.crossover),
                                  tol=args.tol)
    if args.corrupt_coeff is not None:
        model = _corrupt(model, args.corrupt_coeff)
    return model


def _corrupt(model, index: int):
    # test hook: perturb one (1-x) coefficient so that verify must fail
    coeffs = np.array(model.unit.coeffs)
    if not 0 < index < len(coeffs):
        raise UsageError(f"--corrupt-coeff: index must lie in 1..{len(coeffs) - 1}")
    coeffs[index] += 1.0
    coeffs.flags.writeable = False
    unit = dataclasses.replace(model.unit, coeffs=coeffs)
    return dataclasses.replace(model, unit=unit)


# ---------------------------------------------------------------------------
# commands


def table(model, grid, kind: str) -> str:
    value, regions, err = evaluator.evaluate(model, grid, "cdf" if kind == "survival" else kind)
    if kind == "cdf":
        value = np.clip(value, 0.0, 1.0)
    elif kind == "survival":
        value = np.clip(1.0 - value, 0.0, 1.0)
    lines = ["x,value,region,est_error"]
    lines += [f"{_fmt(x)},{_fmt(v)},{r},{_fmt(e)}"
              for x, v, r, e in zip(grid, value, regions, err)]
    return "\n".join(lines) + "\n"


def cmd_table(args, kind):
    model = model_from_args(args)
    return table(model, parse_grid(args.grid), kind), EXIT_OK


def cmd_coeffs(args):
    spec = spec_from_args(args)
    n = 10 if args.n is None else args.n
    if n < 0:
        raise UsageError(f"--n must be >= 0, got {n}")
    coeffs = build_unit(spec, n).coeffs
    lines = ["n,c_n"] + [f"{i},{_fmt(c)}" for i, c in enumerate(coeffs)]
    return "\n".join(lines) + "\n", EXIT_OK


def moments_table(model, n_max: int):
    spec = model.spec
    u_min, delta = min(spec.u), spec.delta
    rows = []
    for n in range(n_max + 1):
        closed = moment(spec, n)
        quad = oracles.moment_quadrature(
            lambda x: evaluator.pdf(model, x), n, u_min, delta, split=model.crossover,
            pdf_of_gap=lambda t: unit_pdf_from_gap(model.unit, t)[0])
        rows.append((n, closed, quad, abs(closed - quad)))
    return rows


def cmd_moments(args):
    model = model_from_args(args)
    n_max = 8 if args.n is None else args.n
    lines = ["n,closed_form,quadrature,abs_diff"]
    lines += [f"{n},{_fmt(a)},{_fmt(b)},{_fmt(d)}" for n, a, b, d in moments_table(model, n_max)]
    return "\n".join(lines) + "\n", EXIT_OK


def verify_checks(model, samples: int, seed: int):
    """Run the oracle suite; yields (name, tolerance, observed, passed)."""
    spec = model.spec
    if model.origin is not None and not model.origin.ill_conditioned:
        xc = np.array([model.crossover])
        o, _ = origin_pdf_with_error(model.origin, xc, model.tol)
        u, _ = unit_pdf_with_error(model.unit, xc)
        gap = float(abs(o[0] - u[0]) / abs(u[0]))
        yield f"continuity at x={model.crossover}", 1e-7, gap, gap <= 1e-7

    # a quadrature that cannot converge (e.g. a jump in the density) is a failed check
    try:
        worst = max(d for _, _, _, d in moments_table(model, 8))
    except ConvergenceError:
        worst = math.inf
    yield "moments n=0..8 (abs)", 1e-6, worst, worst <= 1e-6

    conv_tol = 1e-6 if spec.m <= 3 else 1e-4
    worst = 0.0
    for x in (0.1, 0.3, 0.5, 0.7, 0.9):
        try:
            ref = oracles.conv_quadrature(spec, x)
        except ConvergenceError as exc:
            ref = exc.estimate
        got = float(evaluator.pdf(model, x))
        worst = max(worst, abs(got - ref) / abs(ref))
    yield "convolution spot checks (rel)", conv_tol, worst, worst <= conv_tol

    if samples > 0:
        batch = oracles.sample_product(spec, samples, seed)
        ks = oracles.ks_statistic(batch, lambda x: evaluator.cdf(model, x))
        ks_tol = 2.0 / math.sqrt(samples)
        yield f"KS statistic, {samples} samples", ks_tol, ks, ks < ks_tol
        m1, m2 = moment(spec, 1), moment(spec, 2)
        se = math.sqrt((m2 - m1 * m1) / samples)
        z = abs(float(np.mean(batch.values)) - m1) / se
        yield "sample mean (standard errors)", 4.0, z, z <= 4.0


def cmd_verify(args):
    model = model_from_args(args)
    lines = []
    ok = True
    for name, tol, observed, passed in verify_checks(model, args.samples, args.seed):
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'}  {name}: observed {observed:.3e}, "
                     f"tolerance {tol:.1e}")
    lines.append("all checks passed" if ok else "verification FAILED")
    return "\n".join(lines) + "\n", EXIT_OK if ok else EXIT_FAIL


def cmd_figures(args):
    model = model_from_args(args)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for name, kind, (a, b, n) in FIGURES:
        (out / name).write_text(table(model, np.linspace(a, b, n), kind))
    args.out = None
    return "".join(f"{out / name}\n" for name, _, _ in FIGURES), EXIT_OK


def cmd_sample(args):
    spec = spec_from_args(args)
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1, got {args.samples}")
    return oracles.sample_product(spec, args.samples, args.seed).to_text(), EXIT_OK


COMMANDS = {
    "pdf": lambda a: cmd_table(a, "pdf"),
    "cdf": lambda a: cmd_table(a, "cdf"),
    "coeffs": cmd_coeffs,
    "moments": cmd_moments,
    "verify": cmd_verify,
    "figures": cmd_figures,
    "sample": cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("product specification")
    src.add_argument("--u", help="comma separated u_i")
    src.add_argument("--v", help="comma separated v_i")
    src.add_argument("--family", choices=("mms", "state-det"))
    src.add_argument("--alpha", type=float, help="parameter of the state-det family")
    common.add_argument("--grid", default="0:1:11", help="start:stop:points (default 0:1:11)")
    common.add_argument("--n", type=int, help="number of coefficients / highest moment")
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--crossover", default=str(evaluator.DEFAULT_CROSSOVER),
                        help="switch point between expansions, or 'auto'")
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--out", help="output file (figures: directory)")
    common.add_argument("--corrupt-coeff", type=int, help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="betaprod", description="Density of a product of independent Beta variables.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "pdf": "density table", "cdf": "distribution function table",
        "coeffs": "(1-x) series coefficients", "moments": "moments, closed form vs quadrature",
        "verify": "run the oracle suite", "figures": "write the four figure tables",
        "sample": "Monte Carlo draws, one per line",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        text, code = COMMANDS[args.command](args)
    except (ValidationError, DomainError) as exc:
        print(f"betaprod: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ArithmeticError, BetaProdError) as exc:
        print(f"betaprod: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
