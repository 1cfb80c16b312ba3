"""Split-operator quantum oracle for transport protocols.

Propagates the 1D Schroedinger equation in a moving harmonic trap with a
Strang-split spectral stepper: half kick in the potential at the midpoint
trap position, full kinetic step in momentum space, half kick again.  The
error is O(dt^2) per unit time and the map is exactly unitary up to FFT
rounding, which the norm check enforces rather than hides.

The analytic reference is the coherent state riding the classical
trajectory: the same RK4 integration used by the classical oracle supplies
the center, velocity, and action phase, so quantum, classical, and
closed-form predictions can disagree only through genuine physics or
stepper error, never through a second trajectory convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import simpson

from .designer import TransportProtocol
from .errors import BoundaryLeakError, ConsistencyError, GridError, SpecError
from .evaluator import classical_simulate

__all__ = [
    "SpatialGrid",
    "WaveFunction",
    "make_grid",
    "ground_state",
    "first_excited_state",
    "propagate",
    "energy_expectation",
    "analytic_solution",
    "fidelity",
    "verification_report",
]

MAX_AUTO_POINTS = 2 ** 14


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic uniform grid; the right endpoint is excluded (FFT convention)."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise SpecError("x_max must exceed x_min")
        if not _is_pow2(self.n_points) or self.n_points < 512:
            raise SpecError(f"n_points must be a power of two >= 512, got {self.n_points}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: SpatialGrid
    psi: np.ndarray
    t: float

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.psi) ** 2)) * self.grid.dx)


def make_grid(protocol: TransportProtocol, omega: float, pad=None, n_points=None) -> SpatialGrid:
    """Grid sized from the classical excursion at this probe frequency.

    The packet center can overshoot the trap by a large fraction of d during
    transport, so the domain follows the classical path, padded by ten
    oscillator lengths (and never less than eight around start and target).
    """
    if not (omega > 0):
        raise SpecError("omega must be positive")
    a_len = 1.0 / math.sqrt(omega)
    if pad is None:
        pad = 10.0 * a_len
    pad = max(pad, 8.0 * a_len)
    res = classical_simulate(protocol, omega)
    s = res.times / protocol.dspec.t_f
    xc = protocol.x0(s) + res.xi
    lo = min(0.0, float(xc.min())) - pad
    hi = max(protocol.dspec.d, float(xc.max())) + pad
    if n_points is None:
        need = 8.0 * (hi - lo) / a_len  # at least 8 samples per oscillator length
        n_points = max(512, 1 << max(0, math.ceil(math.log2(need))))
        if n_points > MAX_AUTO_POINTS:
            raise GridError(
                f"domain [{lo:.3g}, {hi:.3g}] needs {n_points} points to resolve "
                f"a_0 = {a_len:.3g}; beyond the {MAX_AUTO_POINTS} cap"
            )
    return SpatialGrid(x_min=lo, x_max=hi, n_points=int(n_points))


def ground_state(grid: SpatialGrid, omega: float, center: float = 0.0) -> WaveFunction:
    if not (omega > 0):
        raise SpecError("omega must be positive")
    a_len = 1.0 / math.sqrt(omega)
    if a_len < 4.0 * grid.dx:
        raise GridError(f"oscillator length {a_len:.3g} under-resolved: dx = {grid.dx:.3g}")
    psi = (omega / math.pi) ** 0.25 * np.exp(-0.5 * omega * (grid.x - center) ** 2)
    psi = psi.astype(np.complex128)
    psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dx)
    return WaveFunction(grid=grid, psi=psi, t=0.0)


def first_excited_state(grid: SpatialGrid, omega: float, center: float = 0.0) -> WaveFunction:
    base = ground_state(grid, omega, center)
    psi = math.sqrt(2.0 * omega) * (grid.x - center) * base.psi
    psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dx)
    return WaveFunction(grid=grid, psi=psi, t=0.0)


def energy_expectation(wf: WaveFunction, omega: float, x0_at_t: float) -> float:
    """<H>/(hbar omega): kinetic part in momentum space, potential on the grid."""
    if not (omega > 0):
        raise SpecError("omega must be positive")
    psi_k = np.fft.fft(wf.psi)
    weight = np.abs(psi_k) ** 2
    kinetic = float(np.sum(0.5 * wf.grid.k ** 2 * weight) / np.sum(weight))
    dens = np.abs(wf.psi) ** 2
    dens /= np.sum(dens)
    potential = float(np.sum(0.5 * omega ** 2 * (wf.grid.x - x0_at_t) ** 2 * dens))
    return (kinetic + potential) / omega


def propagate(protocol: TransportProtocol, grid: SpatialGrid, omega: float, dt=None,
              history=None, record_every: int = 0) -> WaveFunction:
    """Run the full transport from the trap ground state at the origin.

    history, when given a list and record_every > 0, collects
    (t, energy_quanta) tuples every record_every steps plus the endpoints.
    """
    if not (omega > 0):
        raise SpecError("omega must be positive")
    tf = protocol.dspec.t_f
    if dt is None:
        dt = min(0.002, 0.02 / omega)
    if dt > 0.02 / omega:
        raise SpecError(f"dt = {dt} too coarse; need dt <= {0.02 / omega:.4g} at omega = {omega}")
    n_steps = max(1, int(math.ceil(tf / dt)))
    dt = tf / n_steps

    x = grid.x
    kin = np.exp(-0.5j * dt * grid.k ** 2)
    s_mid = (np.arange(n_steps) + 0.5) * (dt / tf)
    x0_mid = protocol.x0(s_mid)

    wf = ground_state(grid, omega, center=protocol.x0(0.0))
    psi = wf.psi.copy()
    peak = float(np.max(np.abs(psi)))

    def check_leak(step: int):
        edge = max(abs(psi[0]), abs(psi[-1]))
        if edge > 1e-8 * peak:
            raise BoundaryLeakError(
                f"edge amplitude {edge:.2e} vs peak {peak:.2e} at step {step}; enlarge the grid"
            )

    def record(step: int):
        if history is not None and record_every > 0:
            t = step * dt
            snap = WaveFunction(grid=grid, psi=psi, t=t)
            x0_now = float(protocol.x0(t / tf))
            history.append((t, energy_expectation(snap, omega, x0_now)))

    record(0)
    for step in range(n_steps):
        half = np.exp(-0.25j * dt * omega ** 2 * (x - x0_mid[step]) ** 2)
        psi = half * np.fft.ifft(kin * np.fft.fft(half * psi))
        if (step + 1) % 128 == 0:
            check_leak(step + 1)
            peak = float(np.max(np.abs(psi)))
        if record_every > 0 and (step + 1) % record_every == 0 and step + 1 < n_steps:
            record(step + 1)
    check_leak(n_steps)
    out = WaveFunction(grid=grid, psi=psi, t=tf)
    if abs(out.norm() - 1.0) > 1e-10:
        raise ConsistencyError(f"norm drifted to {out.norm():.12f}; stepper is not unitary")
    record(n_steps)
    return out


def analytic_solution(protocol: TransportProtocol, grid: SpatialGrid, omega: float,
                      t=None) -> WaveFunction:
    """Coherent state on the classical path, with the classical action phase.

    psi(x, t) = (omega/pi)^(1/4) exp(-omega (x - x_c)^2 / 2)
                * exp(i [v_c (x - x_c) + phi_L - omega t / 2])
    where phi_L integrates the classical Lagrangian of the center motion.
    """
    tf = protocol.dspec.t_f
    if t is None:
        t = tf
    if not 0.0 <= t <= tf:
        raise SpecError(f"t = {t} outside [0, {tf}]")
    n_steps = max(4000, int(math.ceil(100.0 * omega * tf)))
    n_steps += n_steps % 2
    res = classical_simulate(protocol, omega, n_steps=n_steps)
    idx = int(round(t / tf * n_steps))
    v_c = res.xi_dot + res.v0_samples
    x_c = protocol.x0(res.times / tf) + res.xi
    lagrangian = 0.5 * v_c ** 2 - 0.5 * omega ** 2 * res.xi ** 2
    phi = float(simpson(lagrangian[: idx + 1], x=res.times[: idx + 1])) if idx > 0 else 0.0
    xc, vc = float(x_c[idx]), float(v_c[idx])
    envelope = (omega / math.pi) ** 0.25 * np.exp(-0.5 * omega * (grid.x - xc) ** 2)
    phase = vc * (grid.x - xc) + phi - 0.5 * omega * t
    psi = envelope * np.exp(1j * phase)
    psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dx)
    return WaveFunction(grid=grid, psi=psi, t=float(t))


def fidelity(a: WaveFunction, b: WaveFunction) -> complex:
    """Complex overlap <a|b>; magnitude near one means matching states."""
    if a.grid != b.grid:
        raise SpecError("wavefunctions live on different grids")
    return complex(np.vdot(a.psi, b.psi) * a.grid.dx)


def verification_report(protocol: TransportProtocol, omega: float, n_points=None,
                        dt=None, pad=None) -> dict:
    """Cross-check quantum, classical, and closed-form answers in one run."""
    grid = make_grid(protocol, omega, pad=pad, n_points=n_points)
    if dt is None:
        dt = min(0.002, 0.02 / omega)
    final = propagate(protocol, grid, omega, dt=dt)
    d = protocol.dspec.d
    e_final = energy_expectation(final, omega, d)
    classical = classical_simulate(protocol, omega)
    overlap = fidelity(final, analytic_solution(protocol, grid, omega))
    delta_q = e_final - 0.5
    delta_c = classical.final_quanta
    rel = abs(delta_q - delta_c) / delta_c if delta_c > 1e-6 else None
    return {
        "omega": omega,
        "tf": protocol.dspec.t_f,
        "d": d,
        "n_points": grid.n_points,
        "dt": dt,
        "final_energy_quanta": e_final,
        "delta_e_quanta": delta_q,
        "classical_delta_e_quanta": delta_c,
        "quantum_classical_rel_err": rel,
        "fidelity_vs_analytic": abs(overlap),
        "overlap_phase_rad": math.atan2(overlap.imag, overlap.real),
        "norm": final.norm(),
    }
