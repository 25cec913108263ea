"""Command-line interface.

Subcommands mirror the library surface: ``risk``, ``plan``, ``curve``,
``simulate``, ``omega-star`` and ``minimax-ratio``.  Single values are printed
as ``key=value`` lines; ``curve`` writes deterministic CSV suitable for
plotting the guaranteed-risk, exact-risk and degradation curves with external
tools.

Exit codes: 0 success, 2 domain error, 3 capacity error (exact risk refused),
4 unreachable planning target, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import enum
import math
import sys
from dataclasses import dataclass

import numpy as np

from .estimators import parse_estimator
from .exceptions import CapacityError, TargetUnreachableError
from .loss import LossFamily, LossSpec, parse_loss
from .minimax import degradation, minimax_ratio_il, minimax_ratio_ll, omega_star_il, omega_star_ll
from .montecarlo import McConfig, empirical_risk
from .planner import plan
from .risk import exact_risk, guaranteed_risk_limit

__all__ = ["main", "run", "CurveRequest", "curve_rows"]


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


class Quantity(enum.Enum):
    GUARANTEED_RISK = "guaranteed-risk"
    EXACT_RISK = "exact-risk"
    DEGRADATION = "degradation"


class Sweep(enum.Enum):
    OVER_N = "n"
    OVER_P = "p"
    OVER_RATIO = "ratio"


@dataclass(frozen=True)
class CurveRequest:
    quantity: Quantity
    sweep: Sweep
    start: float
    stop: float
    points: int
    scale: str
    loss: LossSpec
    n: int | None = None
    p: float | None = None
    estimator: str = "umvu"

    def __post_init__(self) -> None:
        if not self.start < self.stop:
            raise ValueError(f"sweep requires start < stop, got [{self.start}, {self.stop}]")
        if self.points < 2:
            raise ValueError(f"sweep needs at least 2 points, got {self.points}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and self.start <= 0.0:
            raise ValueError("log scale requires positive endpoints")


def _grid(req: CurveRequest) -> np.ndarray:
    if req.scale == "log":
        return np.geomspace(req.start, req.stop, req.points)
    return np.linspace(req.start, req.stop, req.points)


def _int_grid(req: CurveRequest) -> list[int]:
    values = [int(round(v)) for v in _grid(req)]
    out: list[int] = []
    for v in values:
        if not out or v != out[-1]:
            out.append(v)
    if out and out[0] < 2:
        raise ValueError("success-count sweeps start at n >= 2")
    return out


def curve_rows(req: CurveRequest) -> tuple[list[str], list[tuple[str, str]]]:
    """Header and formatted rows for a curve request."""
    if req.quantity is Quantity.GUARANTEED_RISK:
        if req.sweep is not Sweep.OVER_N:
            raise ValueError("guaranteed-risk curves sweep over n")
        rows = [(str(n), _fmt(guaranteed_risk_limit(req.loss, n))) for n in _int_grid(req)]
        return ["n", "risk_bar"], rows
    if req.quantity is Quantity.EXACT_RISK:
        if req.sweep is Sweep.OVER_P:
            if req.n is None:
                raise ValueError("exact-risk sweeps over p need --n")
            spec = parse_estimator(req.estimator, req.n, req.loss)
            rows = [
                (_fmt(p), _fmt(exact_risk(req.loss, spec, float(p)).value))
                for p in _grid(req)
            ]
            return ["p", "risk"], rows
        if req.sweep is Sweep.OVER_N:
            if req.p is None:
                raise ValueError("exact-risk sweeps over n need --p")
            rows = []
            for n in _int_grid(req):
                spec = parse_estimator(req.estimator, n, req.loss)
                rows.append((str(n), _fmt(exact_risk(req.loss, spec, req.p).value)))
            return ["n", "risk"], rows
        raise ValueError("exact-risk curves sweep over n or p")
    if req.sweep is Sweep.OVER_N:
        rows = [(str(n), _fmt(degradation(req.loss, n).degradation)) for n in _int_grid(req)]
        return ["n", "degradation"], rows
    if req.sweep is Sweep.OVER_RATIO:
        if req.n is None:
            raise ValueError("degradation sweeps over the slope ratio need --n")
        rows = []
        for r in _grid(req):
            point_loss = LossSpec(req.loss.family, float(r), 1.0)
            rows.append((_fmt(r), _fmt(degradation(point_loss, req.n).degradation)))
        return ["ratio", "degradation"], rows
    raise ValueError("degradation curves sweep over n or ratio")


def _cmd_risk(args: argparse.Namespace) -> int:
    loss = parse_loss(args.loss)
    spec = parse_estimator(args.estimator, args.n, loss)
    report = exact_risk(loss, spec, args.p)
    print(
        f"risk={_fmt(report.value)} method={report.method.value} "
        f"error_bound={_fmt(report.error_bound)} m0={report.m0}"
    )
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    loss = parse_loss(args.loss)
    result = plan(loss, args.target)
    est = result.estimator
    print(
        f"n={result.n} omega={_fmt(est.omega)} d={_fmt(est.d)} "
        f"guaranteed_risk={_fmt(result.guaranteed_risk)}"
    )
    return 0


def _cmd_curve(args: argparse.Namespace) -> int:
    req = CurveRequest(
        quantity=Quantity(args.quantity),
        sweep=Sweep(args.sweep),
        start=args.start,
        stop=args.stop,
        points=args.points,
        scale=args.scale,
        loss=parse_loss(args.loss),
        n=args.n,
        p=args.p,
        estimator=args.estimator,
    )
    header, rows = curve_rows(req)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    loss = parse_loss(args.loss)
    spec = parse_estimator(args.estimator, args.n, loss)
    cfg = McConfig(p=args.p, trials=args.trials, seed=args.seed, chunk=args.chunk)
    result = empirical_risk(loss, spec, cfg)
    print(
        f"mean_loss={_fmt(result.mean_loss)} std_error={_fmt(result.std_error)} "
        f"mean_stopping_time={_fmt(result.mean_stopping_time)} trials={result.trials}"
    )
    return 0


def _cmd_omega_star(args: argparse.Namespace) -> int:
    loss = parse_loss(args.loss)
    if loss.family is LossFamily.LINEAR_LINEAR:
        value = omega_star_ll(args.n, loss.a, loss.b)
    else:
        value = omega_star_il(args.n, loss.a, loss.b)
    print(f"omega_star={_fmt(value)}")
    return 0


def _cmd_minimax_ratio(args: argparse.Namespace) -> int:
    family = LossFamily(args.loss)
    if family is LossFamily.LINEAR_LINEAR:
        value = minimax_ratio_ll(args.n)
    else:
        value = minimax_ratio_il(args.n)
    print(f"ratio={_fmt(value)}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibsrisk",
        description="Probability estimation under inverse binomial sampling "
        "with asymmetric normalized loss.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    risk_p = sub.add_parser("risk", help="exact risk at a given p")
    risk_p.add_argument("--loss", required=True, help="ll:a=<v>,b=<v> or il:a=<v>,b=<v>")
    risk_p.add_argument("--estimator", required=True,
                        help="umvu, ml, il-default or custom:omega=<v>,d=<v>")
    risk_p.add_argument("--n", type=int, required=True)
    risk_p.add_argument("--p", type=float, required=True)
    risk_p.set_defaults(func=_cmd_risk)

    plan_p = sub.add_parser("plan", help="smallest n meeting a guaranteed risk")
    plan_p.add_argument("--loss", required=True)
    plan_p.add_argument("--target", type=float, required=True)
    plan_p.set_defaults(func=_cmd_plan)

    curve_p = sub.add_parser("curve", help="write a CSV curve")
    curve_p.add_argument("--quantity", required=True,
                         choices=[q.value for q in Quantity])
    curve_p.add_argument("--sweep", required=True, choices=[s.value for s in Sweep])
    curve_p.add_argument("--start", type=float, required=True)
    curve_p.add_argument("--stop", type=float, required=True)
    curve_p.add_argument("--points", type=int, required=True)
    curve_p.add_argument("--scale", default="linear", choices=["linear", "log"])
    curve_p.add_argument("--loss", required=True)
    curve_p.add_argument("--n", type=int, default=None)
    curve_p.add_argument("--p", type=float, default=None)
    curve_p.add_argument("--estimator", default="umvu")
    curve_p.add_argument("--out", required=True)
    curve_p.set_defaults(func=_cmd_curve)

    sim_p = sub.add_parser("simulate", help="Monte Carlo risk estimate")
    sim_p.add_argument("--loss", required=True)
    sim_p.add_argument("--estimator", required=True)
    sim_p.add_argument("--n", type=int, required=True)
    sim_p.add_argument("--p", type=float, required=True)
    sim_p.add_argument("--trials", type=int, required=True)
    sim_p.add_argument("--seed", type=int, required=True)
    sim_p.add_argument("--chunk", type=int, default=100_000)
    sim_p.set_defaults(func=_cmd_simulate)

    star_p = sub.add_parser("omega-star", help="minimax-optimal constant")
    star_p.add_argument("--loss", required=True)
    star_p.add_argument("--n", type=int, required=True)
    star_p.set_defaults(func=_cmd_omega_star)

    ratio_p = sub.add_parser("minimax-ratio", help="slope ratio making the proposed estimator minimax")
    ratio_p.add_argument("--loss", required=True, choices=["ll", "il"])
    ratio_p.add_argument("--n", type=int, required=True)
    ratio_p.set_defaults(func=_cmd_minimax_ratio)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TargetUnreachableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


def run() -> None:
    sys.exit(main())
