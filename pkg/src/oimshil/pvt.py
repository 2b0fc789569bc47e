"""Process/voltage/temperature scenarios and their frequency/phase deviations.

Deviations are fractional frequency shifts (``df / f``) for every Ising node
and SHIL source, plus per-source phase offsets and phase-drift rates.  Ring
oscillators (nodes and ROSC-SHILs) follow the supply and temperature freely;
the ROA brick shifts coherently and is clamped to its locked-in tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractError
from .shil import IDEAL, ROA, ROSC

T_NOMINAL = 27.0
T_COLD, T_HOT = -40.0, 125.0
MAX_VOLTAGE_PCT = 0.2
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class VariationScenario:
    voltage_pct: float = 0.0
    temperature_c: float = T_NOMINAL
    process_seed: int | None = None
    process_sigma: float = 0.02
    tag: str = "nominal"

    def __post_init__(self):
        if not abs(self.voltage_pct) <= MAX_VOLTAGE_PCT:
            raise ConfigError(f"|voltage_pct| must be <= {MAX_VOLTAGE_PCT}, got {self.voltage_pct}")
        if not T_COLD <= self.temperature_c <= T_HOT:
            raise ConfigError(
                f"temperature {self.temperature_c} C outside supported corners [{T_COLD}, {T_HOT}]"
            )
        if self.process_sigma < 0:
            raise ConfigError("process_sigma must be non-negative")

    @property
    def process_enabled(self):
        return self.process_seed is not None

    def with_process_seed(self, seed):
        return VariationScenario(self.voltage_pct, self.temperature_c, seed, self.process_sigma, self.tag)


@dataclass(frozen=True)
class SensitivityModel:
    """Fractional-frequency sensitivity of each oscillator type.

    ``alpha_*`` multiplies the fractional supply deviation, ``beta_*`` is the
    shift reached at a temperature corner.  ``gamma_rosc`` scales the
    voltage-driven phase drift of each distributed ROSC-SHIL relative to the
    others (in units of the reference frequency, weighted by the source's
    place on the supply gradient).  These are calibrated knobs, not device
    physics.
    """

    alpha_node: float = 1.0
    beta_node: float = 0.03
    alpha_rosc: float = 1.0
    beta_rosc: float = 0.03
    gamma_rosc: float = 1.0
    alpha_roa: float = 0.2
    beta_roa: float = 0.01
    roa_freq_clamp: float = 0.02
    roa_phase_clamp: float = 0.04

    def __post_init__(self):
        if self.roa_freq_clamp < 0 or self.roa_phase_clamp < 0:
            raise ConfigError("ROA clamps must be non-negative")


@dataclass(frozen=True, eq=False)
class DeviationSet:
    node_dfrac: np.ndarray
    source_dfrac: np.ndarray
    source_dphase: np.ndarray
    source_dphase_rate: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.source_dphase_rate is None:
            object.__setattr__(self, "source_dphase_rate", np.zeros_like(self.source_dfrac))
        for name in ("node_dfrac", "source_dfrac", "source_dphase", "source_dphase_rate"):
            a = np.array(getattr(self, name), dtype=np.float64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        k = len(self.source_dfrac)
        if not len(self.source_dphase) == len(self.source_dphase_rate) == k:
            raise ContractError("per-source deviation vectors differ in length")

    @classmethod
    def zeros(cls, n_nodes, n_sources):
        return cls(np.zeros(n_nodes), np.zeros(n_sources), np.zeros(n_sources), np.zeros(n_sources))

    @property
    def is_zero(self):
        return not any(np.any(a) for a in (self.node_dfrac, self.source_dfrac,
                                           self.source_dphase, self.source_dphase_rate))


def temperature_factor(t):
    """Piecewise-linear map of temperature to [-1, 1], 0 at 27 C, +-1 at the corners."""
    if t >= T_NOMINAL:
        return (t - T_NOMINAL) / (T_HOT - T_NOMINAL)
    return (t - T_NOMINAL) / (T_NOMINAL - T_COLD)


def supply_gradient(k):
    """Relative local supply excursion of ``k`` distributed sources, -1 .. +1.

    Sources are numbered along the floorplan, so a linear profile stands in
    for the IR-drop gradient between the first and last block.
    """
    if k == 1:
        return np.zeros(1)
    return np.linspace(-1.0, 1.0, k)


def _stream(seed, role):
    # Philox is counter-based: each (seed, role) stream is independent of call order
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, role])
    return np.random.Generator(np.random.Philox(ss))


_NODE_STREAM, _SOURCE_STREAM, _PHASE_STREAM, _ROA_STREAM = 11, 12, 13, 14


def apply_variation(scenario, shil, n_nodes, sens=SensitivityModel()):
    """Concrete per-element deviations for ``scenario`` on ``shil``."""
    if shil.n_nodes != n_nodes:
        raise ContractError(f"SHIL assigns {shil.n_nodes} nodes, problem has {n_nodes}")
    k = len(shil.sources)
    v = scenario.voltage_pct
    tf = temperature_factor(scenario.temperature_c)
    sigma = scenario.process_sigma if scenario.process_enabled else 0.0
    seed = scenario.process_seed

    node = np.full(n_nodes, sens.alpha_node * v + sens.beta_node * tf)
    if sigma > 0:
        node = node + _stream(seed, _NODE_STREAM).normal(0.0, sigma, n_nodes)

    if shil.kind == IDEAL:
        return DeviationSet(node, np.zeros(k), np.zeros(k), np.zeros(k))

    if shil.kind == ROSC:
        dfrac = np.full(k, sens.alpha_rosc * v + sens.beta_rosc * tf)
        dphase = np.zeros(k)
        if scenario.process_enabled:
            if sigma > 0:
                dfrac = dfrac + _stream(seed, _SOURCE_STREAM).normal(0.0, sigma, k)
            dphase = _stream(seed, _PHASE_STREAM).uniform(0.0, TWO_PI, k)
        ratio = shil.reference_freq / shil.f1
        rate = sens.gamma_rosc * v * TWO_PI * ratio * supply_gradient(k)
        return DeviationSet(node, dfrac, dphase, rate)

    if shil.kind == ROA:
        d = sens.alpha_roa * v + sens.beta_roa * tf
        ph = 0.0
        if scenario.process_enabled:
            g = _stream(seed, _ROA_STREAM)
            d += g.normal(0.0, sigma) if sigma > 0 else 0.0
            ph = g.uniform(-1.0, 1.0) * sens.roa_phase_clamp * TWO_PI
        d = float(np.clip(d, -sens.roa_freq_clamp, sens.roa_freq_clamp))
        lim = sens.roa_phase_clamp * TWO_PI
        ph = float(np.clip(ph, -lim, lim))
        return DeviationSet(node, np.full(k, d), np.full(k, ph), np.zeros(k))

    raise ContractError(f"unknown SHIL kind {shil.kind!r}")


@dataclass(frozen=True)
class CornerFamily:
    """One column group of the variation table: scenarios run, worst reported."""

    name: str
    scenarios: tuple[VariationScenario, ...]
    seeds: tuple[int, ...] = ()


def corner_suite(process_sigma=0.02, n_seeds=20):
    """Nominal, +-5 % and +-10 % supply, -40/125 C, and Monte Carlo process."""
    mc = tuple(range(n_seeds))
    return [
        CornerFamily("nominal", (VariationScenario(tag="nominal"),)),
        CornerFamily("voltage5", (VariationScenario(0.05, tag="v+5"),
                                  VariationScenario(-0.05, tag="v-5"))),
        CornerFamily("voltage10", (VariationScenario(0.10, tag="v+10"),
                                   VariationScenario(-0.10, tag="v-10"))),
        CornerFamily("temp-40", (VariationScenario(temperature_c=T_COLD, tag="t-40"),)),
        CornerFamily("temp125", (VariationScenario(temperature_c=T_HOT, tag="t125"),)),
        CornerFamily("process", (VariationScenario(process_seed=0, process_sigma=process_sigma,
                                                   tag="process"),), mc),
    ]
