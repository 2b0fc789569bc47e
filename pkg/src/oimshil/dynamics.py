"""Phase dynamics of a SHIL-driven oscillator Ising machine.

Time is measured in node cycles (``t * f1``) and phases live in the frame
rotating at ``reference_freq / 2``.  Each node obeys

    dphi_i/dt = 2 pi dfrac_i - k_c sum_j J_ij sin(phi_i - phi_j)
                - k_s a_src sin(2 phi_i - theta_src(t))

where ``theta_src`` advances at the source's detuning from the reference.
In the autonomous case (no detuning, no deviations) this is gradient flow
on :func:`lyapunov_energy`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import _kernel_py
from ._backend import get_kernel
from .errors import ConfigError, ContractError, IntegrationError
from .ising import as_spins

TWO_PI = 2.0 * math.pi
_NOISE_STREAM, _INIT_STREAM = 21, 22
COUPLINGS = ("sine", "sawtooth")


@dataclass(frozen=True)
class DynamicsConfig:
    """Integration and settling parameters.

    ``settle_mode="hold"`` declares a run settled only if the phases stay in
    the two-group band from ``settled_at`` to the end of the horizon;
    ``"first"`` accepts the first window of ``settle_window_cycles`` and stops.
    A positive ``shil_ramp_cycles`` raises the SHIL gain linearly from zero
    to ``k_s`` over that many cycles; 0 keeps it constant.
    """

    k_c: float = 1.0
    k_s: float = 1.0
    dt_cycles: float = 0.01
    max_cycles: float = 200.0
    noise_sigma: float = 0.0
    settle_band: float = math.pi / 8
    settle_window_cycles: float = 3.0
    sample_stride_cycles: float = 1.0
    settle_mode: str = "hold"
    coupling: str = "sine"
    shil_ramp_cycles: float = 0.0

    def __post_init__(self):
        if not self.k_c > 0:
            raise ConfigError("k_c must be positive")
        if self.k_s < 0:
            raise ConfigError("k_s must be non-negative")
        if not 0 < self.dt_cycles <= 0.05:
            raise ConfigError(f"dt_cycles must lie in (0, 0.05], got {self.dt_cycles}")
        if not self.max_cycles > 0:
            raise ConfigError("max_cycles must be positive")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be non-negative")
        if not 0 < self.settle_band < math.pi / 4:
            raise ConfigError("settle_band must lie in (0, pi/4)")
        if self.settle_window_cycles < 0 or self.sample_stride_cycles <= 0:
            raise ConfigError("settle window and sample stride must be positive")
        if self.settle_mode not in ("hold", "first"):
            raise ConfigError(f"unknown settle_mode {self.settle_mode!r}")
        if self.shil_ramp_cycles < 0:
            raise ConfigError("shil_ramp_cycles must be non-negative")
        if self.coupling not in COUPLINGS:
            raise ConfigError(f"unknown coupling function {self.coupling!r}")

    @property
    def n_steps(self):
        return int(round(self.max_cycles / self.dt_cycles))


@dataclass(frozen=True, eq=False)
class PhaseState:
    phases: np.ndarray
    t_cycles: float = 0.0

    def __post_init__(self):
        p = np.array(self.phases, dtype=np.float64)
        if p.ndim != 1:
            raise ContractError("phases must be a 1-D vector")
        p = _kernel_py.wrap(p)
        p.setflags(write=False)
        object.__setattr__(self, "phases", p)

    @property
    def n(self):
        return len(self.phases)


@dataclass(eq=False)
class PhaseTrajectory:
    samples: list
    settled_at_cycles: float | None
    binarized: bool
    final: PhaseState
    seed: int | None = None
    config: DynamicsConfig | None = None
    inband: np.ndarray | None = field(default=None, repr=False)

    @property
    def times(self):
        return np.array([t for t, _ in self.samples])

    @property
    def phases(self):
        return np.array([p for _, p in self.samples])


def initial_state(n, seed):
    """Uniform random phases in [0, 2 pi)."""
    g = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), _INIT_STREAM])))
    return PhaseState(g.uniform(0.0, TWO_PI, n))


# -- system assembly ----------------------------------------------------------

def _check_dims(n, problem, shil, dev):
    if problem.n != n:
        raise ContractError(f"state has {n} phases, problem has {problem.n} nodes")
    if shil.n_nodes != n:
        raise ContractError(f"SHIL assigns {shil.n_nodes} nodes, expected {n}")
    if len(dev.node_dfrac) != n or len(dev.source_dfrac) != len(shil.sources):
        raise ContractError("deviation set does not match problem/SHIL dimensions")


def assemble(problem, shil, dev, cfg):
    """Flat arrays consumed by the phase kernels."""
    a = problem.matrix
    freq = shil.freqs * (1.0 + dev.source_dfrac)
    return dict(
        indptr=np.asarray(a.indptr, dtype=np.int64),
        indices=np.asarray(a.indices, dtype=np.int64),
        data=cfg.k_c * np.asarray(a.data, dtype=np.float64),
        omega=TWO_PI * dev.node_dfrac,
        src_of=np.asarray(shil.assignment, dtype=np.int64),
        src_rate=TWO_PI * (freq - shil.reference_freq) / shil.f1 + dev.source_dphase_rate,
        src_phase0=shil.phase_offsets + dev.source_dphase,
        src_gain=cfg.k_s * shil.amplitudes,
        ramp=float(cfg.shil_ramp_cycles),
    )


class _SawtoothField(_kernel_py.Field):
    def __init__(self, problem, k_c, **arrays):
        super().__init__(**arrays)
        self.i, self.j = problem.rows, problem.cols
        self.w = k_c * problem.couplings
        self.n = problem.n

    def __call__(self, phi, t, trig=None):
        base = super().__call__(phi, t, trig)
        s, c = _kernel_py.sincos(phi)
        sine = s * (self.a @ c) - c * (self.a @ s)
        d = phi[self.i] - phi[self.j]
        f = self.w * sawtooth(d)
        saw = np.bincount(self.i, f, self.n) - np.bincount(self.j, f, self.n)
        return base + sine - saw


def sawtooth(x):
    """2 pi-periodic odd ramp, ``wrap(x) / pi`` with ``wrap`` into [-pi, pi)."""
    return (np.mod(np.asarray(x) + math.pi, TWO_PI) - math.pi) / math.pi


def _field(problem, shil, dev, cfg):
    arrays = assemble(problem, shil, dev, cfg)
    if cfg.coupling == "sawtooth":
        return _SawtoothField(problem, cfg.k_c, **arrays)
    return _kernel_py.Field(**arrays)


def rhs(state, problem, shil, dev, cfg):
    """Phase velocities ``dphi/dt`` (radians per node cycle) at ``state``."""
    _check_dims(state.n, problem, shil, dev)
    return _field(problem, shil, dev, cfg)(state.phases, state.t_cycles)


def _autonomous(shil, dev):
    return dev.is_zero and np.all(shil.freqs == shil.reference_freq) and not np.any(shil.phase_offsets)


def lyapunov_energy(state, problem, shil, dev, cfg):
    """``E = -k_c sum_{i<j} J_ij cos(dphi_ij) - (k_s / 2) sum_i a_i cos(2 phi_i)``.

    Only defined for the autonomous system, where ``rhs = -grad E``.
    """
    _check_dims(state.n, problem, shil, dev)
    if not _autonomous(shil, dev) or cfg.coupling != "sine":
        raise ContractError("energy is only defined without detuning, deviations or sawtooth coupling")
    if state.t_cycles < cfg.shil_ramp_cycles:
        raise ContractError("energy is undefined while the SHIL gain is still ramping")
    p = state.phases
    couple = -cfg.k_c * np.sum(problem.couplings * np.cos(p[problem.rows] - p[problem.cols]))
    amp = shil.amplitudes[shil.assignment]
    return float(couple - 0.5 * cfg.k_s * np.sum(amp * np.cos(2.0 * p)))


def common_mode(phases):
    """Angle ``c`` such that the phases cluster around ``c`` and ``c + pi``."""
    p = np.asarray(phases, dtype=np.float64)
    return 0.5 * math.atan2(np.sin(2 * p).sum(), np.cos(2 * p).sum())


def binarize(state, reference=0.0):
    """Round each phase to the nearer of ``reference`` (+1) and ``reference + pi`` (-1).

    Phases in ``[reference - pi/2, reference + pi/2)`` map to +1, so an exact
    ``pi/2`` offset rounds to -1.
    """
    p = state.phases if isinstance(state, PhaseState) else np.asarray(state, dtype=np.float64)
    d = np.mod(p - reference + math.pi / 2, TWO_PI)
    return as_spins(np.where(d < math.pi, 1, -1))


def in_band(state, band=math.pi / 8):
    """True when every phase lies within ``band`` of one of two antipodal groups."""
    trig = _kernel_py.sincos(state.phases if isinstance(state, PhaseState) else state)
    return _kernel_py.inband(trig, math.cos(2 * band))


# -- integration ---------------------------------------------------------------

def _settle(flags, dt, window, mode):
    w = max(1, int(round(window / dt)))
    if mode == "first":
        run = 0
        for k, f in enumerate(flags):
            run = run + 1 if f else 0
            if run >= w:
                return (k - w + 2) * dt
        return None
    out = np.flatnonzero(flags == 0)
    start = 0 if len(out) == 0 else out[-1] + 1
    if len(flags) - start < w:
        return None
    return (start + 1) * dt


def integrate(initial, problem, shil, dev, cfg=DynamicsConfig(), seed=0, backend=None):
    """Fixed-step RK4 from ``initial`` over ``cfg.max_cycles`` node cycles.

    Noise, when enabled, is added after each RK4 step as an Euler-Maruyama
    increment of std ``noise_sigma * sqrt(dt)``.  Samples are taken every
    ``sample_stride_cycles``.
    """
    n = initial.n
    _check_dims(n, problem, shil, dev)
    arrays = assemble(problem, shil, dev, cfg)
    kernel = get_kernel("python" if cfg.coupling == "sawtooth" else backend)
    dt = cfg.dt_cycles
    total = cfg.n_steps
    stride = max(1, int(round(cfg.sample_stride_cycles / dt)))
    step0 = int(round(initial.t_cycles / dt))
    noise_rng = None
    if cfg.noise_sigma > 0:
        noise_rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence([int(seed), _NOISE_STREAM])))
    phi = np.array(initial.phases, dtype=np.float64)
    flags = np.zeros(total, dtype=np.uint8)
    samples = [(initial.t_cycles, phi.copy())]
    cos_band2 = math.cos(2.0 * cfg.settle_band)
    w = max(1, int(round(cfg.settle_window_cycles / dt)))
    done = 0
    settled = None
    while done < total:
        m = min(stride, total - done)
        noise = np.empty((0, n))
        if noise_rng is not None:
            noise = noise_rng.normal(0.0, cfg.noise_sigma * math.sqrt(dt), (m, n))
        chunk = np.zeros(m, dtype=np.uint8)
        if kernel is _kernel_py and cfg.coupling == "sawtooth":
            bad = _integrate_py_field(phi, step0 + done, m, dt, _field(problem, shil, dev, cfg),
                                      noise, cos_band2, chunk)
        else:
            bad = kernel.integrate_chunk(phi, step0 + done, m, dt, arrays["indptr"],
                                         arrays["indices"], arrays["data"], arrays["omega"],
                                         arrays["src_of"], arrays["src_rate"],
                                         arrays["src_phase0"], arrays["src_gain"], noise,
                                         cos_band2, chunk, arrays["ramp"])
        if bad >= 0:
            k = step0 + done + bad
            raise IntegrationError(f"non-finite phase at step {k} (t = {(k + 1) * dt:g} cycles)", k)
        flags[done:done + m] = chunk
        done += m
        samples.append((initial.t_cycles + done * dt, phi.copy()))
        if cfg.settle_mode == "first" and done >= w:
            settled = _settle(flags[:done], dt, cfg.settle_window_cycles, "first")
            if settled is not None:
                flags = flags[:done]
                break
    if cfg.settle_mode == "hold":
        settled = _settle(flags, dt, cfg.settle_window_cycles, "hold")
    if settled is not None:
        settled += initial.t_cycles
    final = PhaseState(phi, initial.t_cycles + done * dt)
    return PhaseTrajectory(samples, settled, settled is not None, final, seed, cfg, flags)


def _integrate_py_field(phi, step0, nsteps, dt, f, noise, cos_band2, out):
    x = phi.copy()
    h2 = 0.5 * dt
    for k in range(nsteps):
        t = (step0 + k) * dt
        k1 = f(x, t)
        k2 = f(x + h2 * k1, t + h2)
        k3 = f(x + h2 * k2, t + h2)
        k4 = f(x + dt * k3, t + dt)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if len(noise):
            x = x + noise[k]
        if not np.all(np.isfinite(x)):
            return k
        x = _kernel_py.wrap(x)
        out[k] = _kernel_py.inband(_kernel_py.sincos(x), cos_band2)
    phi[:] = x
    return -1


# -- export --------------------------------------------------------------------

def write_trajectory(traj, path):
    """CSV ``t_cycles,phi_0,...`` plus a JSON metadata sidecar next to it."""
    path = Path(path)
    ph = traj.phases
    n = ph.shape[1]
    header = ",".join(["t_cycles"] + [f"phi_{i}" for i in range(n)])
    data = np.column_stack([traj.times, ph])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.10g")
    meta = {
        "seed": traj.seed,
        "config": asdict(traj.config) if traj.config else None,
        "settled_at": traj.settled_at_cycles,
        "binarized": traj.binarized,
    }
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")
    return path
