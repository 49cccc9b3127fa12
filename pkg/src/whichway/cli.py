"""Command-line entry point.

    whichway report     --in config.json [--out report.json]
    whichway sweep-fig3 [--grid 101x101] [--out fig3.csv]
    whichway sweep-fq   [--grid 101x101] [--s-norm 0.882] [--out fq.csv]
    whichway channel    [--in channel.json | --w-plus W --epsilon E] [--samples N] [--seed S]
    whichway verify     [--samples N] [--seed S] [--in regression.json]

Exit codes: 0 success, 1 a checked relation failed, 2 usage or schema
error, 3 unphysical state.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import channel, configio, engine, qmath, sqds, verify
from .channel import ChannelConfig

DEFAULT_SEED = 20020415
SEED_ENV_VAR = "WHICHWAY_SEED"
DEFAULT_GRID = (101, 101)
DEFAULT_CHANNEL_TRIALS = 1_000_000
FIG5_S_NORM = 0.882

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_UNPHYSICAL = 0, 1, 2, 3

FIG3_HEADER = ["P", "Q", "D2", "V2", "slack"]
FQ_HEADER = ["P_Q", "Q_D", "f_Q", "branch"]


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(x), ".17g")


def parse_grid(text: str) -> tuple[int, int]:
    try:
        n, m = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like NxM, got {text!r}")
    if n < 2 or m < 2:
        raise argparse.ArgumentTypeError("grid counts must be at least 2")
    return n, m


def parse_seed(text: str) -> int:
    seed = int(text)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def default_seed() -> int:
    env = os.environ.get(SEED_ENV_VAR)
    return parse_seed(env) if env else DEFAULT_SEED


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_json(path: str | None):
    if path is None:
        raise UsageError("--in PATH is required")
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise configio.SchemaError("$", f"invalid JSON: {exc}")


def _pure_xz(p: float) -> np.ndarray:
    return np.array([p, 0.0, np.sqrt(max((1 - p) * (1 + p), 0.0))])


# ---------------------------------------------------------------- commands

def cmd_report(args) -> int:
    cfg = configio.interferometer_from_dict(_read_json(args.input))
    report = engine.duality_report(cfg)
    _write(_dump_json({"config": cfg.to_dict(), "report": report.to_dict()}), args.output)
    return EXIT_OK if report.all_slacks_hold() else EXIT_FAILED


def fig3_rows(grid: tuple[int, int]) -> list[list[float]]:
    """Pure Quanton with ``P = s_x`` and a pure SQDS Detecton with
    ``Phi = arcsin Q``; D from the engine trace norm, V from ``|C| V0``."""
    rows = []
    for p in np.linspace(0, 1, grid[0]):
        for q in np.linspace(0, 1, grid[1]):
            scfg = sqds.SqdsConfig(_pure_xz(p), np.array([0.0, 0.0, 1.0]), Phi=np.arcsin(q))
            ecfg = sqds.to_engine_config(scfg)
            d2 = engine.distinguishability(ecfg) ** 2
            v2 = engine.visibility(ecfg) ** 2
            rows.append([p, q, d2, v2, 1 - d2 - v2])
    return rows


def fq_rows(grid: tuple[int, int], s_norm: float, q_max: float | None = None) -> list[list]:
    """f_Q over ``P_Q in [0, 1]`` and ``Q_D in [0, q_max]`` for ``|s_D0| = s_norm``.

    The Detecton is taken with zero predictability so ``Q_D = s_norm |sin Phi|``.
    Rows with ``Q_D > s_norm`` are marked ``skipped``; rows at ``D_Q = 1`` are
    marked ``undefined``.
    """
    if not 0 <= s_norm <= 1:
        raise UsageError("s-norm must lie in [0, 1]")
    q_max = s_norm if q_max is None else q_max
    rows = []
    for p in np.linspace(0, 1, grid[0]):
        for q in np.linspace(0, q_max, grid[1]):
            if q > s_norm:
                rows.append([p, q, float("nan"), "skipped"])
                continue
            phi = np.arcsin(q / s_norm) if s_norm > 0 else 0.0
            cfg = sqds.SqdsConfig(_pure_xz(p), np.array([0.0, 0.0, s_norm]), Phi=phi)
            try:
                rows.append([p, q, sqds.f_q(cfg), sqds.branch(cfg)])
            except sqds.UndefinedQuantityError:
                rows.append([p, q, float("nan"), "undefined"])
    return rows


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def cmd_sweep_fig3(args) -> int:
    rows = fig3_rows(args.grid)
    _write(_csv(FIG3_HEADER, rows), args.output)
    return EXIT_OK if all(abs(r[4]) <= 1e-10 for r in rows) else EXIT_FAILED


def cmd_sweep_fq(args) -> int:
    rows = fq_rows(args.grid, args.s_norm, args.q_max)
    _write(_csv(FQ_HEADER, rows), args.output)
    defined = [r[2] for r in rows if r[3] in ("P", "R")]
    return EXIT_OK if all(0 <= f <= 1 + 1e-12 for f in defined) else EXIT_FAILED


def channel_summary(cfg: ChannelConfig, n_trials: int, seed: int) -> dict:
    L = channel.posterior_likelihood(cfg)
    emp = channel.monte_carlo_bet(cfg, n_trials, seed=seed)
    bound = channel.binomial_bound(L, n_trials)
    return {
        "w_plus": cfg.w_plus, "epsilon": cfg.epsilon,
        "n_trials": n_trials, "seed": seed, "rng": "numpy PCG64",
        "P": channel.predictability(cfg),
        "Q": channel.channel_quality(cfg),
        "D": channel.total_distinguishability(cfg),
        "L_prior": channel.prior_likelihood(cfg),
        "L_posterior": L,
        "L_empirical": emp,
        "bound_3sigma": bound,
        "pass": abs(emp - L) <= bound,
    }


def cmd_channel(args) -> int:
    data = _read_json(args.input) if args.input else {}
    if args.w_plus is not None:
        data["w_plus"] = args.w_plus
    if args.epsilon is not None:
        data["epsilon"] = args.epsilon
    if "w_plus" not in data or "epsilon" not in data:
        raise UsageError("channel needs w_plus and epsilon (flags or --in JSON)")
    n_trials = args.samples or data.pop("n_trials", DEFAULT_CHANNEL_TRIALS)
    data.pop("n_trials", None)
    cfg = configio.channel_from_dict(data)
    summary = channel_summary(cfg, n_trials, args.seed)
    _write(_dump_json(summary), args.output)
    return EXIT_OK if summary["pass"] else EXIT_FAILED


def cmd_verify(args) -> int:
    samples = args.samples if args.samples is not None else 1000
    replay = _read_json(args.input) if args.input else None
    if samples < 1 and replay is None:
        raise UsageError("--samples must be at least 1")
    result = verify.run_verify(samples, args.seed, replay)
    _write(_dump_json(result), args.output)
    for name, suite in result["suites"].items():
        worst = ", ".join(f"{k}={v['worst']:.2e}" for k, v in suite["checks"].items())
        status = "ok" if suite["passed"] else "FAILED"
        print(f"[{status}] {name}: {worst}", file=sys.stderr)
    return EXIT_OK if result["passed"] else EXIT_FAILED


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", metavar="PATH")
    common.add_argument("--out", dest="output", metavar="PATH")
    common.add_argument("--seed", type=parse_seed, default=None,
                        help=f"default {DEFAULT_SEED}, or ${SEED_ENV_VAR}")
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--grid", type=parse_grid, default=DEFAULT_GRID, metavar="NxM")

    ap = argparse.ArgumentParser(prog="whichway", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("report", parents=[common], help="duality report for one config"
                   ).set_defaults(func=cmd_report)
    sub.add_parser("sweep-fig3", parents=[common], help="D^2, V^2 over (P, Q), pure states"
                   ).set_defaults(func=cmd_sweep_fig3)
    p = sub.add_parser("sweep-fq", parents=[common], help="f_Q over (P_Q, Q_D)")
    p.add_argument("--s-norm", type=float, default=FIG5_S_NORM)
    p.add_argument("--q-max", type=float, default=None)
    p.set_defaults(func=cmd_sweep_fq)
    p = sub.add_parser("channel", parents=[common], help="classical channel and betting")
    p.add_argument("--w-plus", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.set_defaults(func=cmd_channel)
    sub.add_parser("verify", parents=[common], help="seeded invariant batch"
                   ).set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.samples is not None and args.samples < 1:
        parser.error("--samples must be at least 1")
    try:
        if args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except configio.SchemaError as exc:
        print(f"schema error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except qmath.UnphysicalStateError as exc:
        print(f"unphysical state: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
