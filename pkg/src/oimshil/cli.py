"""Command line: ``oimshil {solve,baseline,plan,mc,sweep}``.

Exit codes: 0 success, 2 configuration error, 3 SHIL capacity exceeded,
4 integration diverged.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .baselines import TabuConfig, brute_force_maxcut, tabu_maxcut
from .config import load_config, parse_seeds
from .errors import CapacityError, ConfigError, ContractError, IntegrationError
from .harness import ProblemSpec, RunConfig, run_corner_matrix, run_single, run_sweep
from .pvt import VariationScenario
from .shil import KINDS, plan, plan_table

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_DIVERGED = 0, 2, 3, 4

log = logging.getLogger("oimshil")


def _scenario(text):
    """``nominal``, ``v+5``/``v-10`` style supply steps, ``t-40``/``t125``, or ``process:SEED``."""
    t = text.strip()
    if t == "nominal":
        return VariationScenario()
    if t.startswith("process"):
        _, _, seed = t.partition(":")
        return VariationScenario(process_seed=int(seed or 0), tag="process")
    if t[0] == "v":
        return VariationScenario(float(t[1:]) / 100.0, tag=t)
    if t[0] == "t":
        return VariationScenario(temperature_c=float(t[1:]), tag=t)
    raise ValueError(text)


def _scenario_arg(text):
    try:
        return _scenario(text)
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(
            f"bad scenario {text!r}; use nominal, v+5, v-10, t-40, t125 or process:SEED") from None


def build_parser():
    p = argparse.ArgumentParser(prog="oimshil", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="integrate one problem under one SHIL architecture")
    s.add_argument("problem", help="problem file (n m header, then i j w lines)")
    s.add_argument("--shil", choices=KINDS, default="ideal")
    s.add_argument("--scenario", type=_scenario_arg, default=VariationScenario())
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--restarts", type=int, default=1)
    s.add_argument("--baseline-cut", type=float, help="accuracy denominator (default: tabu)")
    s.add_argument("--config", help="INI file supplying dynamics/pvt/power settings")

    b = sub.add_parser("baseline", help="max cut by tabu search or exhaustive enumeration")
    b.add_argument("problem")
    b.add_argument("--method", choices=("tabu", "brute"), default="tabu")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--restarts", type=int, default=10)
    b.add_argument("--tenure", type=int, default=20)
    b.add_argument("--max-sweeps", type=int, default=2000)

    pl = sub.add_parser("plan", help="SHIL sizing for a node count")
    pl.add_argument("--shil", choices=KINDS + ("all",), default="all")
    pl.add_argument("--nodes", type=int, required=True)
    pl.add_argument("--format", choices=("json", "table"), default="json")

    m = sub.add_parser("mc", help="variation matrix over kinds, corners and seeds")
    m.add_argument("--config", required=True)
    m.add_argument("--seeds", help="override [run] seeds, e.g. 0-4")

    w = sub.add_parser("sweep", help="one parameter over a list of values")
    w.add_argument("--config", required=True)
    return p


def _cmd_solve(a):
    cfg, _ = load_config(a.config) if a.config else (RunConfig(), None)
    if not Path(a.problem).is_file():
        raise ConfigError(f"problem file {a.problem} does not exist")
    spec = ProblemSpec(path=a.problem, baseline_cut=a.baseline_cut)
    cfg = replace(cfg, problem=spec, kind=a.shil, scenario=a.scenario, restarts=a.restarts)
    m = run_single(cfg, a.seed)
    rec = m.row()
    rec["spins"] = [int(x) for x in m.spins]
    print(json.dumps(rec))


def _cmd_baseline(a):
    from .ising import read_problem

    if not Path(a.problem).is_file():
        raise ConfigError(f"problem file {a.problem} does not exist")
    g = read_problem(a.problem)
    if a.method == "brute":
        res = brute_force_maxcut(g)
    else:
        res = tabu_maxcut(g, TabuConfig(a.tenure, a.max_sweeps, a.restarts, a.seed))
    print(json.dumps(res.as_record()))


def _cmd_plan(a):
    kinds = KINDS if a.shil == "all" else (a.shil,)
    plans = [plan(k, a.nodes) for k in kinds]
    if a.format == "table":
        print(plan_table(plans))
    else:
        for p in plans:
            print(p.to_json())


def _progress(i, total):
    if i % 20 == 0 or i == total:
        log.info("run %d/%d", i, total)


def _cmd_mc(a):
    cfg, _ = load_config(a.config)
    if a.seeds:
        cfg = replace(cfg, seeds=parse_seeds(a.seeds))
    res = run_corner_matrix(cfg, progress=_progress)
    written = res.write(cfg.output)
    if not cfg.output.table:
        sys.stdout.write(res.table())
    for p in written:
        log.info("wrote %s", p)


def _cmd_sweep(a):
    cfg, sweep = load_config(a.config)
    if sweep is None:
        raise ConfigError("config has no [sweep] section")
    text = run_sweep(cfg, *sweep)
    if cfg.output.runs_csv:
        out = Path(cfg.output.runs_csv)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)


COMMANDS = {"solve": _cmd_solve, "baseline": _cmd_baseline, "plan": _cmd_plan,
            "mc": _cmd_mc, "sweep": _cmd_sweep}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.cmd](args)
    except CapacityError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except IntegrationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, ContractError) as e:
        stage = getattr(e, "stage", None)
        print(f"error: {stage + ': ' if stage else ''}{e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
