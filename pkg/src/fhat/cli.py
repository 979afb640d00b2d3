"""Command-line harness.

Subcommands: solve-game, simulate, sweep, bounds, enumerate.  Every
output file is written together with a `<file>.manifest.json` recording
the tool version, resolved flags and seed, so the exact run can be
reproduced (`fhat sweep --manifest <file>` replays a sweep and emits a
byte-identical CSV at any worker count).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone


from . import __version__
from . import bounds as bounds_mod
from . import montecarlo as mc
from .model import BUILTIN_MODELS, ModelError, resolve_model
from .numerics import nats_to_db
from .strategy import (KINDS, asymmetric_rule, build_strategy,
                       default_epsilon, empirical_rule, symmetric_rule)

STRATEGY_CHOICES = tuple(KINDS)


def _workers_default() -> int:
    try:
        return int(os.environ.get("FHAT_WORKERS", "0"))
    except ValueError:
        return 0


def _parse_horizons(text: str) -> list[int]:
    """Accept '100:500:100' (inclusive range) or '100,200,300'."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise ValueError(f"bad horizon range {text!r}")
        if step <= 0 or stop < start:
            raise ValueError(f"bad horizon range {text!r}")
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p]


def _epsilon_fn(args):
    if getattr(args, "epsilon", None) is not None:
        eps = float(args.epsilon)
        return lambda N: eps
    return default_epsilon


def _write_with_manifest(path: str, content: str, subcommand: str, flags: dict,
                         seed) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(content)
    manifest = {
        "tool": "fhat",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "subcommand": subcommand,
        "flags": flags,
        "seed": seed,
        "output": os.path.basename(path),
    }
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(args, content: str, subcommand: str, flags: dict, seed=None) -> None:
    if getattr(args, "output", None):
        _write_with_manifest(args.output, content, subcommand, flags, seed)
    else:
        sys.stdout.write(content)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_solve_game(args) -> int:
    model = resolve_model(args.model)
    if not 0 <= args.reference < model.num_hypotheses:
        raise ModelError(
            f"reference {args.reference} out of range for {model.num_hypotheses} hypotheses")
    from .game import solve, verify_minimax
    sol = solve(model, args.reference)
    rep = verify_minimax(sol, 1e-8)
    lines = [
        f"model: {args.model}",
        f"reference: {model.hypotheses[args.reference]}",
        f"value: {mc.fmt9(sol.value)} nats",
        "alpha_star: " + " ".join(f"{model.experiments[u]}={mc.fmt9(float(a))}"
                                  for u, a in enumerate(sol.alpha_star)),
        "beta_star: " + " ".join(
            f"{model.hypotheses[j]}={mc.fmt9(float(b))}"
            for j, b in zip(model.alternates(args.reference), sol.beta_star)),
        "payoff_matrix (experiments x alternates):",
    ]
    for u in range(model.num_experiments):
        lines.append("  " + model.experiments[u] + ": "
                     + " ".join(mc.fmt9(float(v)) for v in sol.payoff_matrix[u]))
    lines.append(f"duality_gap: {mc.fmt9(rep.gap)}")
    _emit(args, "\n".join(lines) + "\n", "solve-game",
          {"model": args.model, "reference": args.reference}, None)
    return 0


def _simulate_flags(args) -> dict:
    return {"model": args.model, "strategy": args.strategy,
            "reference": args.reference, "horizon": args.horizon,
            "trials": args.trials, "epsilon": args.epsilon,
            "theta": args.theta, "calibrate": args.calibrate,
            "inner": args.inner}


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise ModelError("--trials must be at least 1")
    model = resolve_model(args.model)
    N = args.horizon
    eps = args.epsilon if args.epsilon is not None else default_epsilon(N)
    workers = args.workers
    rows = []
    if args.strategy == "symmetric":
        spec = build_strategy(model, "symmetric", N, epsilon=eps,
                              inner_kind=args.inner)
        games = {i: spec.inner[i].game for i in range(model.num_hypotheses)}
        rule = symmetric_rule(model, games, N, eps)
        rep = mc.estimate(mc.SimulationConfig(model, spec, rule, N,
                                              args.trials, args.seed, workers))
        for i in sorted(rule.thresholds):
            est = rep.lse[i]
            rows.append(mc.SweepRow(
                strategy="symmetric", N=N, epsilon=eps,
                theta=rule.thresholds[i], psi_hat=rep.psi_hat[i],
                psi_se=rep.psi_se[i], log_inv_phi=est.log_inv_phi,
                log_inv_phi_se=est.se,
                phi_db=float(nats_to_db(est.log_inv_phi)),
                gamma_hat=rep.gamma_hat_lse, weak_bound=math.nan,
                strong_bound=math.nan, seed=args.seed))
    else:
        if args.reference is None:
            raise ModelError(f"--strategy {args.strategy} needs --reference")
        if not 0 <= args.reference < model.num_hypotheses:
            raise ModelError(f"--reference {args.reference} out of range")
        i = args.reference
        spec = build_strategy(model, args.strategy, N, reference=i, epsilon=eps)
        if args.theta is not None:
            rule = empirical_rule(i, args.theta, eps)
        elif args.calibrate:
            theta = mc.best_threshold_search(model, spec, N, eps, args.trials,
                                             seed=args.seed, workers=workers)
            rule = empirical_rule(i, theta, eps)
        else:
            rule = asymmetric_rule(model, spec.game, N, eps)
        rep = mc.estimate(mc.SimulationConfig(model, spec, rule, N,
                                              args.trials, args.seed, workers))
        est = rep.lse[i]
        weak = bounds_mod.weak_converse(spec.game, model, N, eps)
        rows.append(mc.SweepRow(
            strategy=args.strategy, N=N, epsilon=eps,
            theta=rule.thresholds[i], psi_hat=rep.psi_hat[i],
            psi_se=rep.psi_se[i], log_inv_phi=est.log_inv_phi,
            log_inv_phi_se=est.se, phi_db=float(nats_to_db(est.log_inv_phi)),
            gamma_hat=rep.gamma_hat, weak_bound=weak,
            strong_bound=math.inf, seed=args.seed))
    _emit(args, mc.rows_to_csv(rows), "simulate", _simulate_flags(args), args.seed)
    return 0


def _sweep_flags(args) -> dict:
    return {"model": args.model, "strategies": args.strategies,
            "reference": args.reference, "horizons": args.horizons,
            "trials": args.trials, "epsilon": args.epsilon,
            "strong": args.strong, "nu": args.nu, "inner": args.inner}


def cmd_sweep(args) -> int:
    if args.manifest:
        with open(args.manifest, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        if manifest.get("subcommand") != "sweep":
            raise ModelError(f"{args.manifest} is not a sweep manifest")
        flags = manifest["flags"]
        for key, value in flags.items():
            setattr(args, key, value)
        args.seed = manifest["seed"]
    if not args.strategies:
        raise ModelError("--strategies must name at least one strategy")
    kinds = [k.strip() for k in args.strategies.split(",") if k.strip()]
    for k in kinds:
        if k not in STRATEGY_CHOICES:
            raise ModelError(f"unknown strategy {k!r}")
    if args.trials < 1:
        raise ModelError("--trials must be at least 1")
    model = resolve_model(args.model)
    horizons = _parse_horizons(args.horizons)
    rows = mc.sweep(model, kinds, args.reference, horizons, args.trials,
                    args.seed, epsilon_fn=_epsilon_fn(args),
                    strong=args.strong, nu=args.nu, workers=args.workers,
                    inner_kind=args.inner)
    _emit(args, mc.rows_to_csv(rows), "sweep", _sweep_flags(args), args.seed)
    return 0


def cmd_bounds(args) -> int:
    model = resolve_model(args.model)
    from .game import solve
    sol = solve(model, args.reference)
    horizons = _parse_horizons(args.horizons)
    rows = bounds_mod.bounds_table(model, sol, horizons, _epsilon_fn(args),
                                   nu=args.nu)
    lines = ["N,epsilon,weak_rate,strong_abs,strong_db,asymptotic_rate"]
    for r in rows:
        lines.append(",".join(mc.fmt9(v) for v in
                              (r.N, r.epsilon, r.weak_rate, r.strong_abs,
                               r.strong_db, r.asymptotic_rate)))
    _emit(args, "\n".join(lines) + "\n", "bounds",
          {"model": args.model, "reference": args.reference,
           "horizons": args.horizons, "nu": args.nu,
           "epsilon": args.epsilon}, None)
    return 0


def cmd_enumerate(args) -> int:
    model = resolve_model(args.model)
    eps = args.epsilon if args.epsilon is not None else default_epsilon(args.horizon)
    spec = build_strategy(model, args.strategy, args.horizon,
                          reference=args.reference, epsilon=eps,
                          inner_kind=args.inner)
    if args.strategy == "symmetric":
        games = {i: spec.inner[i].game for i in range(model.num_hypotheses)}
        rule = symmetric_rule(model, games, args.horizon, eps)
    elif args.theta is not None:
        rule = empirical_rule(args.reference, args.theta, eps)
    else:
        rule = asymmetric_rule(model, spec.game, args.horizon, eps)
    rep = mc.enumerate_exact(model, spec, rule, args.horizon,
                             step_cap=max(args.horizon, mc.ENUM_STEP_CAP))
    lines = [f"leaves: {rep.leaves}"]
    for i in sorted(rep.psi):
        lines.append(f"psi[{model.hypotheses[i]}]: {mc.fmt9(rep.psi[i])}")
        lines.append(f"phi[{model.hypotheses[i]}]: {mc.fmt9(rep.phi[i])}")
    lines.append(f"gamma: {mc.fmt9(rep.gamma)}")
    _emit(args, "\n".join(lines) + "\n", "enumerate",
          {"model": args.model, "strategy": args.strategy,
           "reference": args.reference, "horizon": args.horizon,
           "theta": args.theta}, None)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fhat",
        description="Fixed-horizon active hypothesis testing harness "
                    f"(built-in models: {', '.join(sorted(BUILTIN_MODELS))})")
    p.add_argument("--version", action="version", version=f"fhat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--model", default=None,
                        help="built-in model name or path to a model file")
        sp.add_argument("--output", default=None,
                        help="write results (plus manifest) to this file")
        sp.add_argument("--workers", type=int, default=_workers_default(),
                        help="parallel worker processes (default: FHAT_WORKERS or serial)")

    sp = sub.add_parser("solve-game", help="solve the experiment-selection game")
    add_common(sp)
    sp.add_argument("--reference", type=int, required=True)
    sp.set_defaults(func=cmd_solve_game)

    sp = sub.add_parser("simulate", help="Monte Carlo evaluation of one strategy")
    add_common(sp)
    sp.add_argument("--strategy", required=True, choices=STRATEGY_CHOICES)
    sp.add_argument("--reference", type=int, default=None)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--trials", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--epsilon", type=float, default=None,
                    help="override the min(0.05, 10/N) schedule")
    sp.add_argument("--theta", type=float, default=None,
                    help="fixed inference threshold (nats)")
    sp.add_argument("--calibrate", action="store_true",
                    help="find the threshold by binary search instead of theory")
    sp.add_argument("--inner", default="das",
                    help="inner strategy kind for the symmetric composite")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="strategy-by-horizon CSV (figure data)")
    add_common(sp)
    sp.add_argument("--strategies", default="",
                    help="comma-separated strategy kinds")
    sp.add_argument("--reference", type=int, default=0)
    sp.add_argument("--horizons", default="100:500:100")
    sp.add_argument("--trials", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--strong", choices=("none", "binary", "empirical"),
                    default="none", help="strong-bound overlay channel")
    sp.add_argument("--nu", type=float, default=None,
                    help="nu for the binary closed-form strong bound")
    sp.add_argument("--inner", default="das")
    sp.add_argument("--manifest", default=None,
                    help="replay a previous sweep from its manifest file")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("bounds", help="converse-bound table over horizons")
    add_common(sp)
    sp.add_argument("--reference", type=int, required=True)
    sp.add_argument("--horizons", default="100:500:100")
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--nu", type=float, default=None)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("enumerate", help="exact small-horizon evaluation")
    add_common(sp)
    sp.add_argument("--strategy", required=True, choices=STRATEGY_CHOICES)
    sp.add_argument("--reference", type=int, default=None)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--theta", type=float, default=None)
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--inner", default="das")
    sp.set_defaults(func=cmd_enumerate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.model is None and not getattr(args, "manifest", None):
            raise ModelError("--model is required")
        return args.func(args)
    except (ModelError, ValueError, OSError) as exc:
        print(f"fhat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
