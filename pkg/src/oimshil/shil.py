"""SHIL architectures: ideal input pin, distributed ROSC-SHILs, ROA brick taps.

A SHIL system is a list of perturbation sources near ``2 * f1`` plus an
assignment of every Ising node to exactly one source.  The planner
functions reproduce the drive-strength and footprint arithmetic used to
size each architecture.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CapacityError, ContractError

IDEAL, ROSC, ROA = "ideal", "rosc", "roa"
KINDS = (IDEAL, ROSC, ROA)


@dataclass(frozen=True)
class ArchitectureDefaults:
    """Nominal design values of the three SHIL architectures (Hz, um^2)."""

    f1_nominal: float = 1.13e9
    rosc_freq: float = 2.18e9
    roa_master_freq: float = 20.82e9
    roa_divider: int = 9
    rosc_drive_limit: int = 65
    roa_drive_total: int = 2792
    roa_taps: int = 4
    rosc_footprint_um2: float = 113.0
    roa_footprint_um2: float = 425812.0
    amplitude_scale: float = 1.0

    @property
    def roa_freq(self):
        return self.roa_master_freq / self.roa_divider

    @property
    def roa_tap_limit(self):
        return self.roa_drive_total // self.roa_taps


DEFAULTS = ArchitectureDefaults()

# calibrated so that a 60 % utilisation target puts the crossover at 625 nodes
NODE_AREA_UM2 = 1022.0


@dataclass(frozen=True)
class ShilSource:
    freq: float
    phase_offset: float = 0.0
    amplitude_scale: float = 1.0

    def __post_init__(self):
        if not self.freq > 0:
            raise ContractError(f"SHIL frequency must be positive, got {self.freq}")
        if self.amplitude_scale < 0:
            raise ContractError("amplitude_scale must be non-negative")


@dataclass(frozen=True, eq=False)
class ShilSystem:
    kind: str
    sources: tuple[ShilSource, ...]
    assignment: np.ndarray
    drive_limit: int | None
    reference_freq: float
    f1: float = field(default=DEFAULTS.f1_nominal)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown SHIL kind {self.kind!r}")
        a = np.array(self.assignment, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "sources", tuple(self.sources))
        k = len(self.sources)
        if k == 0:
            raise ContractError("SHIL system needs at least one source")
        if len(a) and (a.min() < 0 or a.max() >= k):
            raise ContractError("assignment refers to a missing source")
        if self.drive_limit is not None and np.any(self.load > self.drive_limit):
            raise CapacityError(
                f"a source drives {int(self.load.max())} nodes, limit is {self.drive_limit}"
            )
        if self.kind == IDEAL:
            s = self.sources
            if k != 1 or s[0].freq != self.reference_freq or s[0].phase_offset != 0:
                raise ContractError("ideal SHIL is one zero-phase source at the reference")
        if self.kind == ROA:
            if len({(s.freq, s.phase_offset) for s in self.sources}) != 1:
                raise ContractError("ROA taps must share frequency and phase")

    @property
    def n_nodes(self):
        return len(self.assignment)

    @property
    def load(self):
        return np.bincount(self.assignment, minlength=len(self.sources))

    @property
    def freqs(self):
        return np.array([s.freq for s in self.sources])

    @property
    def phase_offsets(self):
        return np.array([s.phase_offset for s in self.sources])

    @property
    def amplitudes(self):
        return np.array([s.amplitude_scale for s in self.sources])


def lattice_shape(n_nodes, shape=None):
    if shape is not None:
        r, c = shape
        if r * c != n_nodes:
            raise ContractError(f"shape {r}x{c} does not hold {n_nodes} nodes")
        return int(r), int(c)
    c = math.ceil(math.sqrt(n_nodes))
    return math.ceil(n_nodes / c), c


def quadrant_assignment(n_nodes, shape=None):
    """Tap index per node: lattice quadrant, 0=top-left .. 3=bottom-right."""
    rows, cols = lattice_shape(n_nodes, shape)
    idx = np.arange(n_nodes)
    r, c = idx // cols, idx % cols
    return 2 * (r >= (rows + 1) // 2) + (c >= (cols + 1) // 2)


def block_assignment(n_nodes, limit):
    """Contiguous row-major blocks of at most ``limit`` nodes."""
    k = math.ceil(n_nodes / limit)
    # balanced blocks: sizes differ by at most one, none above ``limit``
    return (np.arange(n_nodes) * k) // n_nodes


def build_shil(kind, f1=DEFAULTS.f1_nominal, n_nodes=1, params=DEFAULTS, shape=None):
    """Instantiate a SHIL system for ``n_nodes`` oscillators running at ``f1``.

    Design frequencies of the ROSC and ROA sources are scaled with ``f1`` so
    that their relative detuning from ``2 * f1`` is preserved.
    """
    if not f1 > 0:
        raise ContractError(f"f1 must be positive, got {f1}")
    if int(n_nodes) < 1:
        raise ContractError(f"need at least one node, got {n_nodes}")
    n_nodes = int(n_nodes)
    ref = 2.0 * f1
    scale = ref / (2.0 * params.f1_nominal)
    amp = params.amplitude_scale
    if kind == IDEAL:
        return ShilSystem(IDEAL, (ShilSource(ref, 0.0, amp),), np.zeros(n_nodes, int), None, ref, f1)
    if kind == ROSC:
        limit = params.rosc_drive_limit
        assign = block_assignment(n_nodes, limit)
        k = int(assign.max()) + 1
        src = tuple(ShilSource(params.rosc_freq * scale, 0.0, amp) for _ in range(k))
        return ShilSystem(ROSC, src, assign, limit, ref, f1)
    if kind == ROA:
        _check_roa_capacity(n_nodes, params)
        assign = quadrant_assignment(n_nodes, shape)
        if np.bincount(assign).max() > params.roa_tap_limit:
            # uneven quadrants near full capacity: balanced blocks keep every tap in limit
            assign = (np.arange(n_nodes) * params.roa_taps) // n_nodes
        src = tuple(ShilSource(params.roa_freq * scale, 0.0, amp) for _ in range(params.roa_taps))
        return ShilSystem(ROA, src, assign, params.roa_tap_limit, ref, f1)
    raise ContractError(f"unknown SHIL kind {kind!r}")


def _check_roa_capacity(n_nodes, params):
    if n_nodes > params.roa_drive_total:
        raise CapacityError(
            f"{n_nodes} nodes exceed the ROA brick drive capacity of "
            f"{params.roa_drive_total} nodes ({params.roa_tap_limit} per tap)"
        )


@dataclass(frozen=True)
class ShilPlan:
    kind: str
    n_nodes: int
    sources_needed: int
    nodes_per_source: int
    footprint_estimate: float
    drive_limit: int | None = None
    bricks: int = 0

    def as_record(self):
        return {
            "kind": self.kind,
            "n_nodes": self.n_nodes,
            "sources": self.sources_needed,
            "nodes_per_source": self.nodes_per_source,
            "footprint_um2": _num(self.footprint_estimate),
        }

    def to_json(self):
        return json.dumps(self.as_record())


def _num(x):
    return int(x) if float(x).is_integer() else float(x)


def plan(kind, n_nodes, params=DEFAULTS):
    if int(n_nodes) < 1:
        raise ContractError(f"need at least one node, got {n_nodes}")
    n = int(n_nodes)
    if kind == IDEAL:
        return ShilPlan(IDEAL, n, 1, n, 0.0)
    if kind == ROSC:
        k = math.ceil(n / params.rosc_drive_limit)
        return ShilPlan(ROSC, n, k, math.ceil(n / k), k * params.rosc_footprint_um2,
                        params.rosc_drive_limit)
    if kind == ROA:
        _check_roa_capacity(n, params)
        taps = params.roa_taps
        return ShilPlan(ROA, n, taps, math.ceil(n / taps), params.roa_footprint_um2,
                        params.roa_tap_limit, bricks=1)
    raise ContractError(f"unknown SHIL kind {kind!r}")


def plan_table(plans):
    """Render plans as an aligned text table."""
    head = ("kind", "n_nodes", "sources", "nodes_per_source", "footprint_um2")
    rows = [tuple(str(p.as_record()[h]) for h in head) for p in plans]
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(head)]
    fmt = "  ".join(("{:<%d}" if i == 0 else "{:>%d}") % w for i, w in enumerate(widths))
    out = [fmt.format(*head), "  ".join("-" * w for w in widths)]
    out += [fmt.format(*r) for r in rows]
    return "\n".join(out)


def utilization_threshold(node_area=NODE_AREA_UM2, target_util=0.60, params=DEFAULTS):
    """Node count above which Ising-node area, not the ROA brick, sets the footprint.

    At utilisation ``u`` the brick stops dominating once the node area reaches
    ``u / (1 - u)`` times the brick footprint.
    """
    if not node_area > 0:
        raise ContractError("node_area must be positive")
    if not 0 < target_util < 1:
        raise ContractError("target_util must lie in (0, 1)")
    need = target_util * params.roa_footprint_um2 / ((1 - target_util) * node_area)
    return max(1, math.ceil(need))


def with_amplitude(system, scale):
    """Copy of ``system`` with every source's amplitude multiplied by ``scale``."""
    src = tuple(replace(s, amplitude_scale=s.amplitude_scale * scale) for s in system.sources)
    return replace(system, sources=src)
