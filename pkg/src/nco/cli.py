"""Command-line interface: run experiments, sweep exponents, validate schedules."""

import argparse
import os
import sys
from pathlib import Path

from nco import dynamics, verify
from nco.config import (ConfigError, ExperimentConfig, load_config, write_csv)
from nco.schedules import classify_region, validate_assumption4


def _resolve_seed(args_seed, cfg: ExperimentConfig):
    """Precedence: --seed, then the config file, then NCO_SEED, then 1."""
    if args_seed is not None:
        return int(args_seed)
    if "seed" in cfg.explicit:
        return cfg.seed
    env = os.environ.get("NCO_SEED")
    if env is not None:
        return int(env)
    return 1


def _summary(sim, traj, quiet: bool) -> None:
    if quiet:
        return
    sched = sim.schedule
    region = classify_region(sched.mu_eff, sched.nu, sched.beta0_eff)
    rep = validate_assumption4(sched, sim.graph.lam)
    final = traj.final
    print(f"final delta = {final.delta:.6g}")
    print(f"final dist_opt = {final.dist_opt:.6g}")
    print(f"region: {region}")
    print("step-size conditions:")
    for line in rep.lines():
        print("  " + line)


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    seed = _resolve_seed(args.seed, cfg)
    sim = cfg.build(seed=seed)
    out = Path(args.out)
    try:
        traj = dynamics.run(sim)
    except dynamics.SimulationDiverged as exc:
        write_csv(exc.trajectory, sim, out, aborted_at=exc.t)
        print(f"run aborted: {exc}", file=sys.stderr)
        return 1
    write_csv(traj, sim, out)
    _summary(sim, traj, args.quiet)
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    mus = [float(v) for v in args.mu.split(",")] if args.mu.strip() else []
    nus = [float(v) for v in args.nu.split(",")] if args.nu.strip() else []
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    failed = False
    for mu in mus:
        for nu in nus:
            cell = ExperimentConfig(values=dict(cfg.values),
                                    explicit=cfg.explicit)
            cell.values["schedule.mu"] = repr(mu)
            cell.values["schedule.nu"] = repr(nu)
            seed = _resolve_seed(args.seed, cell)
            sim = cell.build(seed=seed)
            name = f"mu{mu:g}_nu{nu:g}".replace(".", "p")
            dest = outdir / f"{name}.csv"
            region = classify_region(mu, nu, sim.schedule.beta0_eff)
            try:
                traj = dynamics.run(sim)
            except dynamics.SimulationDiverged as exc:
                write_csv(exc.trajectory, sim, dest, aborted_at=exc.t)
                rows.append((mu, nu, region.in_r1, "nan", "nan"))
                failed = True
                continue
            write_csv(traj, sim, dest)
            rows.append((mu, nu, region.in_r1, repr(traj.final.delta),
                         repr(traj.final.dist_opt)))
    with open(outdir / "summary.csv", "w", encoding="utf-8") as fh:
        fh.write("mu,nu,in_R1,final_delta,final_dist\n")
        for mu, nu, in_r1, fd, fdist in rows:
            fh.write(f"{mu!r},{nu!r},{int(in_r1)},{fd},{fdist}\n")
    if not args.quiet:
        print(f"wrote {len(rows)} cells to {outdir}")
    return 1 if failed else 0


def cmd_validate_schedule(args) -> int:
    cfg = load_config(args.config)
    sim = cfg.build()
    rep = validate_assumption4(sim.schedule, sim.graph.lam)
    for line in rep.lines():
        print(line)
    print()
    verdict = {True: "pass", False: "fail", None: "n/a"}
    for key, v in rep.verdicts.items():
        print(f"assumption4.{key}={verdict[v]}")
    print(f"c1={rep.c1!r}")
    print(f"c2={rep.c2!r}")
    print(f"lambda={rep.lam!r}")
    print(f"t1={rep.t1!r}")
    print(f"t2={rep.t2!r}")
    print(f"t0={rep.t0!r}")
    return 0 if rep.ok else 1


def cmd_classify_region(args) -> int:
    res = classify_region(args.mu, args.nu, args.beta0)
    print(res)
    return 0


def cmd_check_lemmas(args) -> int:
    reports = []
    if args.suite in ("all", "deterministic"):
        reports += verify.deterministic_suite(fast=args.fast)
    if args.suite in ("all", "stochastic"):
        seed = int(args.seed) if args.seed is not None \
            else int(os.environ.get("NCO_SEED", "1"))
        reports += verify.stochastic_suite(seed=seed)
    ok = True
    for rep in reports:
        print(rep)
        ok = ok and rep.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nco",
        description="Two-time-scale decentralized subgradient simulation "
                    "over noisy time-varying networks")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write a CSV")
    run.add_argument("--config", required=True,
                     help="config path or bundled name (e.g. fig2_topleft)")
    run.add_argument("--out", required=True, help="output CSV path")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--quiet", action="store_true")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="grid sweep over (mu, nu)")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.add_argument("--mu", required=True, help="comma-separated mu values")
    sweep.add_argument("--nu", required=True, help="comma-separated nu values")
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--quiet", action="store_true")
    sweep.set_defaults(func=cmd_sweep)

    vs = sub.add_parser("validate-schedule",
                        help="step-size condition report for a config")
    vs.add_argument("--config", required=True)
    vs.set_defaults(func=cmd_validate_schedule)

    cr = sub.add_parser("classify-region",
                        help="convergence-region membership for (mu, nu)")
    cr.add_argument("--mu", type=float, required=True)
    cr.add_argument("--nu", type=float, required=True)
    cr.add_argument("--beta0", type=float, default=1.0)
    cr.set_defaults(func=cmd_classify_region)

    cl = sub.add_parser("check-lemmas", help="numerical verification suites")
    cl.add_argument("--suite", choices=["all", "deterministic", "stochastic"],
                    default="all")
    cl.add_argument("--seed", type=int, default=None)
    cl.add_argument("--fast", action="store_true",
                    help="reduced instance counts (for smoke testing)")
    cl.set_defaults(func=cmd_check_lemmas)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
