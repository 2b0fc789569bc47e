"""Experiment orchestration: single runs, the variation matrix, metrics and outputs.

A run builds the problem, the SHIL system and its deviations, integrates a
number of restarts and keeps the restart with the best cut.  The matrix
crosses SHIL kinds with the corner families of :func:`pvt.corner_suite` and
emits one row per run plus per-cell aggregates and a text table laid out
like the usual variation table (binarized yes/no and accuracy per column).
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .baselines import TabuConfig, tabu_maxcut
from .dynamics import DynamicsConfig, binarize, common_mode, initial_state, integrate
from .errors import ConfigError, ContractError, OimError
from .ising import cut_size, kings_graph, maxcut_to_ising, read_problem
from .pvt import SensitivityModel, VariationScenario, apply_variation, corner_suite
from .shil import DEFAULTS, IDEAL, KINDS, ROA, ROSC, build_shil, with_amplitude

log = logging.getLogger(__name__)

# Operating point used for every benchmark-scale experiment: the SHIL gain
# ramps up over the first 50 cycles so coupling can order the phases before
# the second-harmonic drive freezes them.
BENCHMARK_DYNAMICS = DynamicsConfig(k_c=1.0, k_s=4.0, shil_ramp_cycles=50.0)


@dataclass(frozen=True)
class PowerModel:
    """Power inputs of the energy model (W) and the node frequency (Hz)."""

    node_power_total: float = 458.9e-3
    shil_power: dict = field(default_factory=lambda: {IDEAL: 0.0, ROSC: 6.0e-3, ROA: 33.0e-3})
    f1: float = DEFAULTS.f1_nominal

    def __post_init__(self):
        if self.node_power_total < 0 or any(v < 0 for v in self.shil_power.values()):
            raise ConfigError("powers must be non-negative")
        if not self.f1 > 0:
            raise ConfigError("f1 must be positive")

    def total(self, kind):
        try:
            return self.node_power_total + self.shil_power[kind]
        except KeyError:
            raise ConfigError(f"no SHIL power given for kind {kind!r}") from None


def energy_to_solution(pm, kind, cycles):
    """``(node power + SHIL power) * cycles / f1`` in joules."""
    if not (cycles >= 0 and math.isfinite(cycles)):
        raise ContractError(f"cycles must be a finite non-negative number, got {cycles}")
    return pm.total(kind) * cycles / pm.f1


@dataclass(frozen=True)
class ProblemSpec:
    """Problem file, or a king's-graph generator when ``path`` is None."""

    path: str | None = None
    rows: int = 18
    cols: int = 18
    weight_rule: str = "random-sign"
    seed: int | None = 2024
    baseline_cut: float | None = None

    def load(self):
        if self.path is not None:
            p = Path(self.path)
            if not p.is_file():
                raise ConfigError(f"problem file {p} does not exist")
            return read_problem(p)
        return _generated(self.rows, self.cols, self.weight_rule, self.seed)


@lru_cache(maxsize=16)
def _generated(rows, cols, rule, seed):
    return kings_graph(rows, cols, rule, seed)


@dataclass(frozen=True)
class OutputPaths:
    runs_csv: str | None = None
    aggregate_csv: str | None = None
    table: str | None = None


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSpec = ProblemSpec()
    kind: str = IDEAL
    kinds: tuple = KINDS
    f1: float = DEFAULTS.f1_nominal
    amplitude_scale: float = 1.0
    scenario: VariationScenario = VariationScenario()
    sensitivity: SensitivityModel = SensitivityModel()
    dynamics: DynamicsConfig = BENCHMARK_DYNAMICS
    restarts: int = 1
    seeds: tuple = tuple(range(20))
    workers: int = 1
    backend: str | None = None
    power: PowerModel = PowerModel()
    output: OutputPaths = OutputPaths()

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        for k in (self.kind, *self.kinds):
            if k not in KINDS:
                raise ConfigError(f"unknown SHIL kind {k!r}")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.problem.path is not None and not Path(self.problem.path).is_file():
            raise ConfigError(f"problem file {self.problem.path} does not exist")


@dataclass(frozen=True)
class RunMetrics:
    kind: str
    scenario: str
    seed: int
    cut: float | None
    accuracy: float | None
    binarized: bool
    cycles_to_solution: float | None
    solution_time_s: float | None
    energy_to_solution_j: float | None
    forced_round: bool = False
    spins: np.ndarray | None = field(default=None, repr=False, compare=False)
    family: str = ""
    error: str = ""

    def row(self):
        return {
            "kind": self.kind,
            "scenario": self.scenario,
            "seed": self.seed,
            "cut": _fmt(self.cut),
            "accuracy": _fmt(self.accuracy),
            "binarized": int(self.binarized),
            "cycles": _fmt(self.cycles_to_solution),
            "time_s": _fmt(self.solution_time_s),
            "energy_j": _fmt(self.energy_to_solution_j),
            "forced_round": int(self.forced_round),
            "error": self.error,
        }


RUN_COLUMNS = ("kind", "scenario", "seed", "cut", "accuracy", "binarized", "cycles",
               "time_s", "energy_j", "forced_round", "error")


def _fmt(x):
    if x is None:
        return ""
    return repr(float(x))


def _tag(exc, stage):
    if not hasattr(exc, "stage"):
        exc.stage = stage
    return exc


@lru_cache(maxsize=16)
def _tabu_best(g):
    # Graph hashes by identity, so each loaded instance is solved once
    return tabu_maxcut(g, TabuConfig()).best_cut


def baseline_cut(cfg, g):
    """Accuracy denominator: the configured constant, else a fresh tabu run."""
    if cfg.problem.baseline_cut is not None:
        return float(cfg.problem.baseline_cut)
    return _tabu_best(g)


def restart_seed(seed, r):
    """Independent initial-condition seed for restart ``r`` of run ``seed``."""
    return int(np.random.SeedSequence([int(seed), int(r)]).generate_state(1)[0])


def run_single(cfg, seed=0, kind=None, scenario=None, baseline=None, graph=None):
    """Best-cut restart of one (kind, scenario, seed) run, as :class:`RunMetrics`.

    Unsettled restarts are still scored: their phases are rounded about the
    common-mode angle and the result carries ``forced_round``.
    """
    kind = kind or cfg.kind
    scenario = scenario or cfg.scenario
    try:
        g = graph if graph is not None else cfg.problem.load()
        problem = maxcut_to_ising(g)
        base = baseline if baseline is not None else baseline_cut(cfg, g)
    except OimError as e:
        raise _tag(e, "problem")
    try:
        shape = g.shape if getattr(g, "shape", None) else None
        shil = build_shil(kind, cfg.f1, g.n, shape=shape)
        if cfg.amplitude_scale != 1.0:
            shil = with_amplitude(shil, cfg.amplitude_scale)
    except OimError as e:
        raise _tag(e, "shil")
    try:
        dev = apply_variation(scenario, shil, g.n, cfg.sensitivity)
    except OimError as e:
        raise _tag(e, "pvt")
    best = None
    for r in range(cfg.restarts):
        rs = restart_seed(seed, r)
        try:
            tr = integrate(initial_state(g.n, rs), problem, shil, dev, cfg.dynamics, rs, cfg.backend)
        except OimError as e:
            raise _tag(e, "integrate")
        spins = binarize(tr.final, common_mode(tr.final.phases))
        cut = cut_size(g, spins)
        if best is None or cut > best[0]:
            best = (cut, tr, spins)
    cut, tr, spins = best
    cycles = tr.settled_at_cycles if tr.binarized else None
    t = e = None
    if cycles is not None:
        pm = replace(cfg.power, f1=cfg.f1)
        t = cycles / cfg.f1
        e = energy_to_solution(pm, kind, cycles)
    acc = cut / base if base else float("nan")
    return RunMetrics(kind, scenario.tag, int(seed), cut, acc, tr.binarized, cycles, t, e,
                      not tr.binarized, spins)


# -- variation matrix -----------------------------------------------------------

@dataclass(frozen=True)
class _Job:
    order: tuple
    kind: str
    family: str
    scenario: VariationScenario
    seed: int


def _jobs(cfg, suite):
    out = []
    for ki, kind in enumerate(cfg.kinds):
        for fi, fam in enumerate(suite):
            for si, sc in enumerate(fam.scenarios):
                for seed in cfg.seeds:
                    s = sc.with_process_seed(seed) if sc.process_enabled else sc
                    out.append(_Job((ki, fi, si, seed), kind, fam.name, s, seed))
    return out


def _run_job(args):
    cfg, job, base, g = args
    try:
        m = run_single(cfg, job.seed, job.kind, job.scenario, base, g)
    except OimError as e:
        stage = getattr(e, "stage", "run")
        m = RunMetrics(job.kind, job.scenario.tag, job.seed, None, None, False, None, None, None,
                       False, None, error=f"{stage}: {type(e).__name__}: {e}")
    return job.order, replace(m, family=job.family, spins=None)


def run_corner_matrix(cfg, suite=None, progress=None):
    """All (kind, scenario, seed) runs, sorted by kind, scenario and seed.

    Failing runs become rows with an ``error`` entry; the matrix continues.
    """
    suite = suite if suite is not None else corner_suite(
        cfg.scenario.process_sigma, n_seeds=len(cfg.seeds))
    g = cfg.problem.load()
    base = baseline_cut(cfg, g)
    jobs = _jobs(cfg, suite)
    args = [(cfg, j, base, g) for j in jobs]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            done = list(ex.map(_run_job, args, chunksize=4))
    else:
        done = []
        for i, a in enumerate(args):
            done.append(_run_job(a))
            if progress:
                progress(i + 1, len(args))
    done.sort(key=lambda x: x[0])
    return MatrixResult([m for _, m in done], suite, tuple(cfg.kinds), base)


@dataclass(frozen=True)
class CellSummary:
    kind: str
    family: str
    scenario: str
    runs: int
    errors: int
    binarized_rate: float
    mean_accuracy: float
    min_accuracy: float
    max_accuracy: float
    mean_cycles: float | None
    reported: bool = False

    def row(self):
        return {
            "kind": self.kind,
            "family": self.family,
            "scenario": self.scenario,
            "runs": self.runs,
            "errors": self.errors,
            "binarized_rate": _fmt(self.binarized_rate),
            "mean_accuracy": _fmt(self.mean_accuracy),
            "min_accuracy": _fmt(self.min_accuracy),
            "max_accuracy": _fmt(self.max_accuracy),
            "mean_cycles": _fmt(self.mean_cycles),
            "reported": int(self.reported),
        }


AGG_COLUMNS = ("kind", "family", "scenario", "runs", "errors", "binarized_rate",
               "mean_accuracy", "min_accuracy", "max_accuracy", "mean_cycles", "reported")


def _summarize(kind, family, tag, rows):
    ok = [m for m in rows if not m.error]
    acc = np.array([m.accuracy for m in ok]) if ok else np.array([np.nan])
    cyc = [m.cycles_to_solution for m in ok if m.cycles_to_solution is not None]
    rate = float(np.mean([m.binarized for m in ok])) if ok else 0.0
    return CellSummary(kind, family, tag, len(rows), len(rows) - len(ok), rate,
                       float(np.mean(acc)), float(np.min(acc)), float(np.max(acc)),
                       float(np.mean(cyc)) if cyc else None)


@dataclass
class MatrixResult:
    rows: list
    suite: list
    kinds: tuple
    baseline: float

    def cells(self):
        """Per-scenario summaries; within a family the worse scenario is ``reported``.

        Worse means lower binarization rate, then lower mean accuracy.
        """
        out = []
        for kind in self.kinds:
            for fam in self.suite:
                group = []
                for sc in fam.scenarios:
                    rows = [m for m in self.rows
                            if m.kind == kind and m.family == fam.name and m.scenario == sc.tag]
                    group.append(_summarize(kind, fam.name, sc.tag, rows))
                worst = min(range(len(group)),
                            key=lambda i: (group[i].binarized_rate, group[i].mean_accuracy, i))
                group[worst] = replace(group[worst], reported=True)
                out.extend(group)
        return out

    def reported(self):
        return {(c.kind, c.family): c for c in self.cells() if c.reported}

    def runs_csv(self):
        return _csv(RUN_COLUMNS, [m.row() for m in self.rows])

    def aggregate_csv(self):
        return _csv(AGG_COLUMNS, [c.row() for c in self.cells()])

    def table(self):
        rep = self.reported()
        fams = [f.name for f in self.suite]
        head = ["kind", "metric"] + fams
        body = []
        for kind in self.kinds:
            b, a = [kind, "binarized"], [kind, "accuracy"]
            for f in fams:
                c = rep[(kind, f)]
                b.append(_yes_no(c.binarized_rate))
                if f == "process":
                    a.append(f"{100 * c.min_accuracy:.1f}-{100 * c.max_accuracy:.1f}%")
                else:
                    a.append(f"{100 * c.mean_accuracy:.1f}%")
            body += [b, a]
        widths = [max(len(str(r[i])) for r in [head] + body) for i in range(len(head))]
        lines = ["  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip()
                 for r in [head] + body]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.append(f"accuracy = cut / baseline cut {self.baseline:g}; "
                     "voltage columns show the worse sign; process shows min-max over seeds")
        return "\n".join(lines) + "\n"

    def write(self, out):
        written = []
        for text, path in ((self.runs_csv(), out.runs_csv),
                           (self.aggregate_csv(), out.aggregate_csv),
                           (self.table(), out.table)):
            if path:
                p = Path(path)
                p.parent.mkdir(parents=True, exist_ok=True)
                p.write_text(text)
                written.append(p)
        return written


def _yes_no(rate):
    if rate == 1.0:
        return "yes"
    if rate == 0.0:
        return "no"
    return f"{100 * rate:.0f}%"


def _csv(columns, rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# -- parameter sweep --------------------------------------------------------------

SWEEP_SECTIONS = {"dynamics": "dynamics", "pvt": "sensitivity", "scenario": "scenario"}


def sweep_config(cfg, param, value):
    """Copy of ``cfg`` with ``section.name`` (e.g. ``dynamics.k_s``) set to ``value``."""
    section, _, name = param.partition(".")
    if section == "run" and name == "restarts":
        return replace(cfg, restarts=int(value))
    if section == "shil" and name == "amplitude_scale":
        return replace(cfg, amplitude_scale=float(value))
    attr = SWEEP_SECTIONS.get(section)
    if attr is None:
        raise ConfigError(f"cannot sweep {param!r}")
    obj = getattr(cfg, attr)
    if name not in obj.__dataclass_fields__:
        raise ConfigError(f"unknown parameter {param!r}")
    cur = getattr(obj, name)
    cast = int if name == "process_seed" else type(cur)
    return replace(cfg, **{attr: replace(obj, **{name: cast(value)})})


def run_sweep(cfg, param, values):
    """``run_single`` over every value and seed; rows carry a leading ``value`` column."""
    g = cfg.problem.load()
    base = baseline_cut(cfg, g)
    rows = []
    for v in values:
        c = sweep_config(cfg, param, v)
        for seed in cfg.seeds:
            _, m = _run_job((c, _Job((), cfg.kind, "", c.scenario, seed), base, g))
            rows.append({"value": v, **m.row()})
    return _csv(("value",) + RUN_COLUMNS, rows)
