"""Command-line interface: ``simulate``, ``check``, ``plot``, ``dump-algebra``."""
import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import lie_core, se2
from .errors import ConfigError, InputError
from .plotting import KINDS, plot_file
from .sim import run
from .trajectory import TrajectoryParseError, write_csv, write_json

EXIT_OK, EXIT_CONFIG, EXIT_COLLISION, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("liereduce")


def _summary(cfg, rec):
    ham = rec.hamiltonian
    return {
        "scenario": cfg.name,
        "formulation": cfg.formulation,
        "method": cfg.integrator.method,
        "gamma_mode": cfg.gamma_mode,
        "h": cfg.integrator.h,
        "steps_requested": rec.steps_requested,
        "steps_completed": rec.steps_completed,
        "min_distance": float(np.min(rec.min_distance)) if len(rec) else None,
        "safety_radius": cfg.params.safety_radius,
        "hamiltonian_drift": float(ham[-1] - ham[0]) if len(rec) else None,
        "max_orth_defect": float(np.max(rec.orth_defect)) if len(rec) else None,
        "repaired_initial_matrices": [a + 1 for a in cfg.repaired_agents],
        "error": rec.error,
    }


def cmd_simulate(args):
    from .config import load_config

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = load_config(args.scenario)
            cfg = cfg.with_overrides(
                gamma_mode=args.gamma_mode,
                method=args.integrator,
                stride=args.stride,
                formulation=args.formulation,
                N=args.steps,
                h=args.h,
            )
        for msg in dict.fromkeys(str(w.message) for w in caught):
            print(f"warning: {msg}", file=sys.stderr)
    except (ConfigError, InputError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out or cfg.output.get("dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    rec = run(cfg)
    csv_path = out / cfg.output.get("csv", "trajectory.csv")
    write_csv(rec, csv_path)
    if args.json or cfg.output.get("json", False):
        write_json(rec, csv_path.with_suffix(".json"))
    plots = [] if args.no_plots else cfg.output.get("plots", list(KINDS))
    if len(rec):
        for kind in plots:
            plot_file(csv_path, kind, out / f"{kind}.svg", W=cfg.metrics[0].W)

    summary = _summary(cfg, rec)
    print(json.dumps(summary, indent=1, sort_keys=True))
    if rec.error is None:
        return EXIT_OK
    return EXIT_COLLISION if rec.error["kind"] == "collision" else EXIT_NUMERICAL


def cmd_check(args):
    from .checks import run_checks

    results = run_checks(args.level, seed=args.seed)
    for res in results:
        print(json.dumps(res.as_dict(), sort_keys=True, default=float))
    return 0 if all(r.passed for r in results) else 1


def cmd_plot(args):
    out = Path(args.output) if args.output else Path(args.trajectory).with_name(f"{args.kind}.svg")
    try:
        plot_file(args.trajectory, args.kind, out)
    except TrajectoryParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(out)
    return EXIT_OK


def _fmt_matrix(M):
    return "\n".join("  [" + " ".join(f"{v:5g}" for v in row) + "]" for row in M)


def dump_algebra():
    lines = ["se(2) basis:"]
    for k, e in enumerate(se2.BASIS, start=1):
        lines += [f"e{k} =", _fmt_matrix(e)]
    lines.append("dual basis (paired by trace):")
    for k, e in enumerate(se2.DUAL_BASIS, start=1):
        lines += [f"e^{k} =", _fmt_matrix(e)]
    P = np.array([[np.trace(a @ e) for e in se2.BASIS] for a in se2.DUAL_BASIS])
    lines += ["pairing matrix tr(e^i e_j):", _fmt_matrix(P)]
    lines.append("brackets:")
    for i in range(3):
        for j in range(i + 1, 3):
            b = lie_core.bracket(se2.STRUCTURE, np.eye(3)[i], np.eye(3)[j])
            terms = [f"{'' if c == 1 else '-' if c == -1 else f'{c:g}'}e{k + 1}" for k, c in enumerate(b) if c]
            lines.append(f"  [e{i + 1},e{j + 1}]=" + ("+".join(terms).replace("+-", "-") if terms else "0"))
    d = se2.DECOMPOSITION
    ok = lie_core.check_decomposition(se2.STRUCTURE, d)
    r = ",".join(f"e{k + 1}" for k in d.r_indices)
    s = ",".join(f"e{k + 1}" for k in d.s_indices)
    lines.append(f"decomposition r={{{r}}} s={{{s}}}: {'valid' if ok else 'invalid'}")
    return "\n".join(lines)


def cmd_dump_algebra(args):
    print(dump_algebra())
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="liereduce", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a scenario and write trajectory + plots")
    sim.add_argument("--scenario", default="paper-unicycles", help="preset name or config file")
    sim.add_argument("--gamma-mode", choices=("oracle", "paper"))
    sim.add_argument("--paper-gamma", dest="gamma_mode", action="store_const", const="paper")
    sim.add_argument("--integrator", choices=("euler-matrix", "lie-euler", "rk4"))
    sim.add_argument("--formulation", choices=("lagrangian", "hamiltonian"))
    sim.add_argument("--steps", type=int)
    sim.add_argument("--h", type=float)
    sim.add_argument("--stride", type=int)
    sim.add_argument("--out")
    sim.add_argument("--json", action="store_true", help="also write a JSON mirror of the CSV")
    sim.add_argument("--no-plots", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    chk = sub.add_parser("check", help="run invariant suites")
    chk.add_argument("level", nargs="?", choices=("quick", "full"), default="quick")
    chk.add_argument("--seed", type=int, default=0)
    chk.set_defaults(func=cmd_check)

    plt = sub.add_parser("plot", help="render a trajectory CSV as SVG")
    plt.add_argument("trajectory")
    plt.add_argument("--kind", choices=KINDS, default="xy")
    plt.add_argument("-o", "--output")
    plt.set_defaults(func=cmd_plot)

    dump = sub.add_parser("dump-algebra", help="print basis, duals, brackets and the split")
    dump.set_defaults(func=cmd_dump_algebra)
    return p


_INTEGRATOR_NAMES = {"euler-matrix": "euler_matrix", "lie-euler": "lie_euler", "rk4": "rk4_chart"}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "integrator", None):
        args.integrator = _INTEGRATOR_NAMES[args.integrator]
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
