"""Pure-numpy phase kernel; same contract as the compiled ``_kernel`` module.

Phases are advanced with classic RK4 in units of node cycles.  Coupling uses
``sin(a - b) = sin a cos b - cos a sin b`` so a step costs two sparse
mat-vecs, and sines/cosines are reduced by quadrant so multiples of pi/2
map to exact 0 and +-1 (binarised states are exact fixed points).
"""

import numpy as np

HALF_PI = np.pi / 2
TWO_PI = 2 * np.pi
BACKEND = "python"


def sincos(x):
    x = np.asarray(x, dtype=np.float64)
    u = x / HALF_PI
    q = np.rint(u)
    r = (u - q) * HALF_PI
    s0, c0 = np.sin(r), np.cos(r)
    qm = np.mod(q, 4).astype(np.int64)
    s = np.choose(qm, (s0, c0, -s0, -c0))
    c = np.choose(qm, (c0, -s0, -c0, s0))
    return s, c


def wrap(phi):
    phi = np.mod(phi, TWO_PI)
    phi[phi >= TWO_PI] = 0.0
    return phi


class Field:
    """Right-hand side of the phase equation for one fixed system."""

    def __init__(self, indptr, indices, data, omega, src_of, src_rate, src_phase0, src_gain,
                 ramp=0.0):
        import scipy.sparse as sp

        n = len(omega)
        self.a = sp.csr_matrix((data, indices, indptr), shape=(n, n))
        self.omega = np.asarray(omega, dtype=np.float64)
        self.src_of = np.asarray(src_of, dtype=np.int64)
        self.rate = np.asarray(src_rate, dtype=np.float64)
        self.phase0 = np.asarray(src_phase0, dtype=np.float64)
        self.gain = np.asarray(src_gain, dtype=np.float64)[self.src_of]
        self.ramp = ramp

    def theta(self, t):
        return self.rate * t + self.phase0

    def __call__(self, phi, t, trig=None):
        s, c = sincos(phi) if trig is None else trig
        ts, tc = sincos(self.theta(t))
        ts, tc = ts[self.src_of], tc[self.src_of]
        coupling = s * (self.a @ c) - c * (self.a @ s)
        s2 = 2.0 * s * c
        c2 = c * c - s * s
        shil = self.gain * (s2 * tc - c2 * ts)
        if self.ramp > 0 and t < self.ramp:
            shil = (t / self.ramp) * shil
        return self.omega - coupling - shil


def inband(trig, cos_band2):
    s, c = trig
    s2 = 2.0 * s * c
    c2 = c * c - s * s
    zx, zy = c2.sum(), s2.sum()
    norm = np.hypot(zx, zy)
    if norm == 0.0:
        return False
    return bool(np.all(c2 * zx + s2 * zy >= cos_band2 * norm))


def integrate_chunk(phi, step0, nsteps, dt, indptr, indices, data, omega, src_of,
                    src_rate, src_phase0, src_gain, noise, cos_band2, inband_out, ramp=0.0):
    """Advance ``phi`` in place by ``nsteps`` RK4 steps.

    ``noise`` is either empty or an ``(nsteps, n)`` array of pre-scaled
    increments added after each step.  ``inband_out[k]`` records whether all
    phases sit in the two-group band after step ``k``.  Returns the index of
    the first non-finite step, or -1.  With ``ramp > 0`` the SHIL gain grows
    linearly from zero over the first ``ramp`` cycles.
    """
    f = Field(indptr, indices, data, omega, src_of, src_rate, src_phase0, src_gain, ramp)
    use_noise = noise is not None and len(noise) > 0
    x = np.array(phi, dtype=np.float64)
    trig = sincos(x)
    h2 = 0.5 * dt
    for k in range(nsteps):
        t = (step0 + k) * dt
        k1 = f(x, t, trig)
        k2 = f(x + h2 * k1, t + h2)
        k3 = f(x + h2 * k2, t + h2)
        k4 = f(x + dt * k3, t + dt)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if use_noise:
            x = x + noise[k]
        if not np.all(np.isfinite(x)):
            phi[:] = x
            return k
        x = wrap(x)
        trig = sincos(x)
        inband_out[k] = inband(trig, cos_band2)
    phi[:] = x
    return -1
