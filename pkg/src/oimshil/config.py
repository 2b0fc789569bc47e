"""INI run configuration: one section per component, every key optional.

Example::

    [problem]
    file = kings18_seed2024.txt      ; relative to this file
    baseline_cut = 315

    [shil]
    kinds = ideal, rosc, roa

    [dynamics]
    k_s = 4
    shil_ramp_cycles = 50

    [run]
    seeds = 0-19

    [output]
    runs_csv = out/runs.csv

Unknown sections or keys are rejected so typos cannot silently fall back
to defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import fields, replace
from pathlib import Path

from .dynamics import DynamicsConfig
from .errors import ConfigError
from .harness import OutputPaths, PowerModel, ProblemSpec, RunConfig
from .pvt import SensitivityModel, VariationScenario

_PROBLEM_KEYS = {"file": str, "rows": int, "cols": int, "weight_rule": str, "seed": int,
                 "baseline_cut": float}
_SHIL_KEYS = {"kind": str, "kinds": str, "f1": float, "amplitude_scale": float}
_POWER_KEYS = {"node_power_total": float, "shil_power_ideal": float, "shil_power_rosc": float,
               "shil_power_roa": float}
_RUN_KEYS = {"restarts": int, "seeds": str, "workers": int, "backend": str}
_OUTPUT_KEYS = {"runs_csv": str, "aggregate_csv": str, "table": str}
_SWEEP_KEYS = {"param": str, "values": str}
SECTIONS = ("problem", "shil", "scenario", "pvt", "dynamics", "power", "run", "output", "sweep")


def _dc_types(cls):
    out = {}
    for f in fields(cls):
        t = f.type if isinstance(f.type, str) else f.type.__name__
        out[f.name] = int if "int" in t else str if "str" in t else float
    return out


def _cast(section, key, raw, typ):
    try:
        return typ(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a valid {typ.__name__}") from None


def _read(cp, section, types):
    if not cp.has_section(section):
        return {}
    out = {}
    for key, raw in cp.items(section):
        if key not in types:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        raw = raw.strip()
        if raw == "":
            out[key] = None
            continue
        out[key] = _cast(section, key, raw, types[key])
    return out


def parse_seeds(text):
    """``"0-19"``, ``"1, 4, 9"`` or a mix of both, in the given order."""
    seeds = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                seeds.extend(range(int(lo), int(hi) + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise ConfigError(f"bad seed list {text!r}") from None
    if not seeds:
        raise ConfigError(f"empty seed list {text!r}")
    return tuple(seeds)


def _split(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def load_config(path):
    """Parse ``path`` into ``(RunConfig, sweep)``; ``sweep`` is ``(param, values)`` or None."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read(path)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}") from None
    return from_parser(cp, path.parent)


def from_parser(cp, base_dir=Path(".")):
    for s in cp.sections():
        if s not in SECTIONS:
            raise ConfigError(f"unknown section [{s}]")
    cfg = RunConfig()

    prob = _read(cp, "problem", _PROBLEM_KEYS)
    file = prob.pop("file", None)
    if file is not None:
        p = Path(file)
        prob["path"] = str(p if p.is_absolute() else base_dir / p)
    problem = replace(ProblemSpec(), **{k: v for k, v in prob.items() if v is not None})
    if "seed" in prob and prob["seed"] is None:
        problem = replace(problem, seed=None)

    shil = _read(cp, "shil", _SHIL_KEYS)
    kw = {"problem": problem}
    if shil.get("kind"):
        kw["kind"] = shil["kind"]
    if shil.get("kinds"):
        kw["kinds"] = _split(shil["kinds"])
    for k in ("f1", "amplitude_scale"):
        if shil.get(k) is not None:
            kw[k] = shil[k]

    sc = _read(cp, "scenario", _dc_types(VariationScenario))
    kw["scenario"] = VariationScenario(**{k: v for k, v in sc.items() if v is not None})
    sens = _read(cp, "pvt", _dc_types(SensitivityModel))
    kw["sensitivity"] = SensitivityModel(**{k: v for k, v in sens.items() if v is not None})
    dyn = _read(cp, "dynamics", _dc_types(DynamicsConfig))
    kw["dynamics"] = replace(cfg.dynamics, **{k: v for k, v in dyn.items() if v is not None})

    pw = _read(cp, "power", _POWER_KEYS)
    pm = PowerModel(f1=kw.get("f1", cfg.f1))
    shil_power = dict(pm.shil_power)
    for kind in list(shil_power):
        if pw.get(f"shil_power_{kind}") is not None:
            shil_power[kind] = pw[f"shil_power_{kind}"]
    node = pw.get("node_power_total")
    kw["power"] = PowerModel(pm.node_power_total if node is None else node, shil_power, pm.f1)

    run = _read(cp, "run", _RUN_KEYS)
    if run.get("restarts") is not None:
        kw["restarts"] = run["restarts"]
    if run.get("workers") is not None:
        kw["workers"] = run["workers"]
    if run.get("seeds") is not None:
        kw["seeds"] = parse_seeds(run["seeds"])
    if run.get("backend"):
        if run["backend"] not in ("auto", "cython", "python"):
            raise ConfigError(f"unknown backend {run['backend']!r}")
        kw["backend"] = run["backend"]

    out = _read(cp, "output", _OUTPUT_KEYS)
    kw["output"] = OutputPaths(**{k: str(base_dir / v) if v and not Path(v).is_absolute() else v
                                  for k, v in out.items()})

    sweep = None
    sw = _read(cp, "sweep", _SWEEP_KEYS)
    if sw:
        if not sw.get("param") or not sw.get("values"):
            raise ConfigError("[sweep] needs both param and values")
        sweep = (sw["param"], _split(sw["values"]))
    return RunConfig(**kw), sweep
