"""Analytic benchmark flows and fixed-step fifth-order particle advection.

Two velocity fields are provided: an unsteady four-cell recirculating eddy
model on [0,2] x [-1,1] with an east-west oscillation, and a meandering zonal
jet with flanking eddies (periodic in x) defined by a closed-form
streamfunction. Integration uses the Cash-Karp fifth-order Runge-Kutta
formula at a fixed substep, storing positions on a uniform sample grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from scsc.ensemble import TrajectoryEnsemble

DAY_SECONDS = 86400.0

# Cash-Karp tableau (fifth-order weights; the embedded fourth-order row is
# not needed at fixed step)
_CK_C = (0.0, 1 / 5, 3 / 10, 3 / 5, 1.0, 7 / 8)
_CK_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (3 / 10, -9 / 10, 6 / 5),
    (-11 / 54, 5 / 2, -70 / 27, 35 / 27),
    (1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096),
)
_CK_B = (37 / 378, 0.0, 250 / 621, 125 / 594, 0.0, 512 / 1771)


@dataclass(frozen=True)
class QuadEddyParams:
    """Four-eddy model du/dt parameters.

    The verbatim variant uses v = -pi*A*cos(pi f)*cos(pi y)*(2 a x + b); the
    divergence-free variant replaces the y factor by +sin(pi y), which is the
    streamfunction-consistent form with psi = A sin(pi f) sin(pi y) and the
    one that produces closed recirculating eddies.
    """

    amplitude: float = 0.1
    eps: float = 0.1
    omega: float = 2 * math.pi / 10
    variant: str = "divergence-free"

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if not 0 <= self.eps < 0.5:
            raise ValueError("eps must be in [0, 0.5)")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.variant not in ("divergence-free", "verbatim"):
            raise ValueError(f"unknown variant {self.variant!r}")

    domain = ((0.0, 2.0), (-1.0, 1.0))


def _quad_eddy_fab(params, t):
    a = params.eps * np.sin(params.omega * t)
    b = 1.0 - 2.0 * params.eps * np.sin(params.omega * t)
    return a, b


def quad_eddy_velocity(x, y, t, params: QuadEddyParams):
    """(u, v) of the four-eddy field at position(s) (x, y) and time t."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = _quad_eddy_fab(params, t)
    f = a * x * x + b * x
    piA = math.pi * params.amplitude
    u = -piA * np.sin(math.pi * f) * np.cos(math.pi * y)
    dfdx = 2.0 * a * x + b
    if params.variant == "verbatim":
        v = -piA * np.cos(math.pi * f) * np.cos(math.pi * y) * dfdx
    else:
        v = piA * np.cos(math.pi * f) * np.sin(math.pi * y) * dfdx
    return u, v


def quad_eddy_streamfunction(x, y, t, params: QuadEddyParams):
    """psi for the divergence-free variant; (u, v) = (-dpsi/dy, dpsi/dx)."""
    if params.variant != "divergence-free":
        raise ValueError("the verbatim variant has no streamfunction")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = _quad_eddy_fab(params, t)
    f = a * x * x + b * x
    return params.amplitude * np.sin(math.pi * f) * np.sin(math.pi * y)


@dataclass(frozen=True)
class BickleyParams:
    """Zonal jet with flanking eddies; SI units (m, s).

    Wave numbers are k_n = 2n/r0 and the co-moving phase speeds are
    sigma_n = c_n - c_3, so the third wave is steady in this frame. The x
    dimension is treated as periodic over domain_x.
    """

    U: float = 62.66
    L: float = 1.77e6
    r0: float = 6.371e6
    c: tuple = (0.1446 * 62.66, 0.205 * 62.66, 0.461 * 62.66)
    eps: tuple = (0.0075, 0.15, 0.3)
    domain_x: tuple = (0.0, 2.0e7)
    domain_y: tuple = (-3.0e6, 3.0e6)

    def __post_init__(self):
        if not (self.U > 0 and self.L > 0 and self.r0 > 0):
            raise ValueError("U, L, r0 must be positive")
        if len(self.c) != 3 or len(self.eps) != 3:
            raise ValueError("c and eps must have 3 entries")

    @property
    def k(self) -> tuple:
        return tuple(2.0 * n / self.r0 for n in (1, 2, 3))

    @property
    def sigma(self) -> tuple:
        return tuple(cn - self.c[2] for cn in self.c)

    @property
    def x_period(self) -> float:
        return self.domain_x[1] - self.domain_x[0]


def _wrap_x(x, params):
    x0 = params.domain_x[0]
    return x0 + np.mod(np.asarray(x, dtype=float) - x0, params.x_period)


def bickley_streamfunction(x, y, t, params: BickleyParams):
    """psi = c3*y - U*L*tanh(y/L) + U*L*sech^2(y/L) * sum_n eps_n cos(k_n (x - sigma_n t))."""
    x = _wrap_x(x, params)
    y = np.asarray(y, dtype=float)
    U, L = params.U, params.L
    sech2 = 1.0 / np.cosh(y / L) ** 2
    wave = np.zeros(np.broadcast(x, y).shape)
    for kn, sn, en in zip(params.k, params.sigma, params.eps):
        wave = wave + en * np.cos(kn * (x - sn * t))
    return params.c[2] * y - U * L * np.tanh(y / L) + U * L * sech2 * wave


def bickley_velocity(x, y, t, params: BickleyParams):
    """(u, v) = (-dpsi/dy, dpsi/dx) from closed-form derivatives of psi.

    x is wrapped into the periodic domain before evaluation, so the field is
    exactly periodic over domain_x by construction.
    """
    x = _wrap_x(x, params)
    y = np.asarray(y, dtype=float)
    U, L = params.U, params.L
    th = np.tanh(y / L)
    sech2 = 1.0 / np.cosh(y / L) ** 2
    wave = np.zeros(np.broadcast(x, y).shape)
    dwave = np.zeros_like(wave)
    for kn, sn, en in zip(params.k, params.sigma, params.eps):
        phase = kn * (x - sn * t)
        wave = wave + en * np.cos(phase)
        dwave = dwave + en * kn * np.sin(phase)
    u = -params.c[2] + U * sech2 + 2.0 * U * sech2 * th * wave
    v = -U * L * sech2 * dwave
    return u, v


@dataclass(frozen=True)
class FlowSpec:
    """A flow model plus the advection window and stored-step count."""

    params: QuadEddyParams | BickleyParams
    t_span: tuple
    n_steps: int

    def __post_init__(self):
        t0, t1 = self.t_span
        if not t1 > t0:
            raise ValueError("t_span must satisfy t1 > t0")
        if self.n_steps < 2:
            raise ValueError("n_steps must be >= 2")

    def velocity(self, p, t):
        """Stacked (n, 2) velocity for stacked positions; used by the integrator."""
        u, v = (
            quad_eddy_velocity(p[:, 0], p[:, 1], t, self.params)
            if isinstance(self.params, QuadEddyParams)
            else bickley_velocity(p[:, 0], p[:, 1], t, self.params)
        )
        return np.stack([u, v], axis=1)

    @property
    def periods(self) -> tuple | None:
        if isinstance(self.params, BickleyParams):
            return (self.params.x_period, None)
        return None


def rk5_step(f, p, t, h):
    """One fixed Cash-Karp step for dp/dt = f(p, t) over all particles at once."""
    ks = []
    for s in range(6):
        q = p
        for a, k in zip(_CK_A[s], ks):
            if a != 0.0:
                q = q + (h * a) * k
        ks.append(f(q, t + _CK_C[s] * h))
    out = p
    for b, k in zip(_CK_B, ks):
        if b != 0.0:
            out = out + (h * b) * k
    return out


def rk5_path(f, p0, times, substeps=10):
    """Integrate dp/dt = f(p, t), storing positions at the given sample times."""
    p0 = np.asarray(p0, dtype=float)
    times = np.asarray(times, dtype=float)
    n_steps = times.shape[0]
    pos = np.empty((p0.shape[0], n_steps, p0.shape[1]))
    pos[:, 0] = p0
    p = p0
    for k in range(1, n_steps):
        t0, t1 = times[k - 1], times[k]
        h = (t1 - t0) / substeps
        for s in range(substeps):
            p = rk5_step(f, p, t0 + s * h, h)
        if not np.all(np.isfinite(p)):
            pid = int(np.argwhere(~np.isfinite(p))[0][0])
            raise ArithmeticError(f"particle {pid} became non-finite near t={t1}")
        pos[:, k] = p
    return pos


def advect(flow: FlowSpec, initial, substeps: int = 10) -> TrajectoryEnsemble:
    """Advect particles through the flow; trajectories are stored unwrapped.

    The fixed step is (t1-t0)/((n_steps-1)*substeps). For the periodic jet,
    wrapping happens only inside the velocity evaluation, so stored
    coordinates accumulate net zonal displacement.
    """
    initial = np.asarray(initial, dtype=float)
    if initial.ndim != 2 or initial.shape[1] != 2:
        raise ValueError(f"initial positions must be (n, 2), got {initial.shape}")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    t0, t1 = flow.t_span
    times = np.linspace(t0, t1, flow.n_steps)
    pos = rk5_path(flow.velocity, initial, times, substeps)
    return TrajectoryEnsemble(positions=pos, times=times, periods=flow.periods)


def seed_uniform(n: int, rect, seed: int) -> np.ndarray:
    """n i.i.d. uniform points over rect = (xmin, xmax, ymin, ymax).

    Drawn from numpy's PCG64 generator so the same seed reproduces the same
    points on any platform. x coordinates are drawn first, then y.
    """
    xmin, xmax, ymin, ymax = rect
    if not (xmax > xmin and ymax > ymin):
        raise ValueError(f"empty domain rectangle {rect}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    x = rng.uniform(xmin, xmax, size=n)
    y = rng.uniform(ymin, ymax, size=n)
    return np.column_stack([x, y])


def noise_ensemble(n: int, n_times: int, seed: int) -> TrajectoryEnsemble:
    """Control ensemble: every stored position i.i.d. uniform on (0,1)^2."""
    if n < 1 or n_times < 1:
        raise ValueError("n and n_times must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    pos = rng.uniform(0.0, 1.0, size=(n, n_times, 2))
    return TrajectoryEnsemble(positions=pos, times=np.arange(float(n_times)))
