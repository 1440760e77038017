"""Benchmark PDE trajectory generation.

All eight benchmark equations are integrated as Fourier coefficients on a
periodic grid: adaptive RK45 for the non-stiff cases and fixed-step ETDRK4
for the stiff one. Nonlinear products are formed in physical space with a
2/3-rule dealias.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import CoefficientVector, Grid1D, LibraryTerm, Trajectory, TrajectorySet

__all__ = [
    "PdeSpec",
    "PDES",
    "RngStream",
    "SolverBlowUpError",
    "initial_condition",
    "solve",
    "add_noise",
    "generate_set",
]

NOISE_SEED_OFFSET = 1000


class SolverBlowUpError(RuntimeError):
    """Raised when an integration produces non-finite values."""


@dataclass(frozen=True)
class RngStream:
    """Seedable portable RNG with derived substreams.

    Identical (seed, stream ids) give identical sequences on every
    platform; substreams are independent PCG64 generators keyed through
    a SeedSequence entropy tuple.
    """

    seed: int
    algorithm: str = "pcg64"

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def generator(self, *stream: int) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([self.seed, *stream]))
        )


@dataclass(frozen=True)
class PdeSpec:
    """A benchmark equation: true coefficients plus solver configuration."""

    name: str
    true_coeffs: CoefficientVector
    domain_length: float
    t_end: float
    stiff: bool = False
    transient: float = 0.0  # integrated then discarded before the first sample

    @property
    def true_support(self) -> frozenset:
        return frozenset(
            t for t, v in zip(self.true_coeffs.terms, self.true_coeffs.values) if v != 0.0
        )

    def default_grid(self, nx: int = 128, nt: int = 128) -> Grid1D:
        return Grid1D(0.0, self.domain_length, nx, 0.0, self.t_end, nt)


def _coeffs(d: dict) -> CoefficientVector:
    return CoefficientVector.from_dict(d)


PDES: dict[str, PdeSpec] = {
    "heat": PdeSpec("heat", _coeffs({"u_xx": 0.1}), 2 * np.pi, 1.0),
    "burgers": PdeSpec("burgers", _coeffs({"u*u_x": -1.0, "u_xx": 0.1}), 2 * np.pi, 1.0),
    "kdv": PdeSpec("kdv", _coeffs({"u*u_x": -1.0, "u_xxx": -1.0}), 2 * np.pi, 0.005),
    "fisher_kpp": PdeSpec(
        "fisher_kpp", _coeffs({"u_xx": 0.01, "u": 1.0, "u^2": -1.0}), 2 * np.pi, 2.0
    ),
    "adv_diff": PdeSpec("adv_diff", _coeffs({"u_x": -1.0, "u_xx": 0.05}), 2 * np.pi, 1.0),
    "ks": PdeSpec(
        "ks",
        _coeffs({"u*u_x": -1.0, "u_xx": -1.0, "u_xxxx": -1.0}),
        32 * np.pi,
        60.0,
        stiff=True,
        transient=20.0,
    ),
    "kdv_burgers": PdeSpec(
        "kdv_burgers",
        _coeffs({"u*u_x": -1.0, "u_xx": 0.05, "u_xxx": -1.0}),
        2 * np.pi,
        0.075,
    ),
    "react_diff": PdeSpec(
        "react_diff", _coeffs({"u_xx": 0.1, "u": 1.0, "u^3": -1.0}), 2 * np.pi, 2.0
    ),
}


def initial_condition(pde: PdeSpec, grid: Grid1D, rng: np.random.Generator) -> np.ndarray:
    """Sample the initial-condition family of a benchmark PDE."""
    if not np.isclose(grid.length, pde.domain_length):
        raise ValueError(f"grid length {grid.length} does not match {pde.name} domain")
    x = grid.x
    name = pde.name
    if name in ("heat", "adv_diff"):
        a = rng.normal(0.0, 0.5, 5)
        b = rng.normal(0.0, 0.5, 5)
        modes = np.arange(1, 6)[:, None] * x[None, :]
        return a @ np.sin(modes) + b @ np.cos(modes)
    if name in ("burgers", "kdv_burgers"):
        return -np.sin(x) + 0.03 * rng.standard_normal(grid.nx)
    if name == "kdv":
        return 12.0 / np.cosh(x - np.pi) ** 2 + 0.1 * rng.standard_normal(grid.nx)
    if name == "fisher_kpp":
        return 0.5 * (1.0 + np.tanh(2.0 * (x - np.pi)))
    if name == "ks":
        return np.cos(x / 16.0) * (1.0 + np.sin(x / 16.0)) + 0.1 * rng.standard_normal(grid.nx)
    if name == "react_diff":
        return 0.5 * np.sin(x) + 0.3 * np.cos(2 * x) + 0.1 * rng.standard_normal(grid.nx)
    raise ValueError(f"unknown PDE {name!r}")


def _split_terms(coeffs: CoefficientVector):
    """Partition active terms into a linear Fourier symbol and nonlinear monomials."""
    linear = []
    nonlinear = []
    for term, c in zip(coeffs.terms, coeffs.values):
        if c == 0.0:
            continue
        if term.power == 1:
            linear.append((term.derivative_order, c))
        else:
            nonlinear.append((term, c))
    return linear, nonlinear


def _nonlinear_rhs(uhat, k, mask, nonlinear: list[tuple[LibraryTerm, float]], nx: int):
    """Nonlinear tendency, formed pointwise on dealiased fields."""
    uhat = np.where(mask, uhat, 0.0)
    fields = {}

    def deriv(d):
        if d not in fields:
            fields[d] = np.fft.irfft(uhat * (1j * k) ** d, n=nx)
        return fields[d]

    out = np.zeros(nx)
    for term, c in nonlinear:
        prod = np.ones(nx)
        for d, p in enumerate(term.powers):
            if p:
                prod = prod * deriv(d) ** p
        out = out + c * prod
    return np.where(mask, np.fft.rfft(out), 0.0)


def _linear_symbol(k, linear):
    sym = np.zeros_like(k, dtype=complex)
    for d, c in linear:
        sym = sym + c * (1j * k) ** d
    return sym


def _etdrk4_coeffs(sym, h, m=32):
    """ETDRK4 scalar coefficients via an m-point contour around each eigenvalue."""
    e_full = np.exp(h * sym)
    e_half = np.exp(0.5 * h * sym)
    r = np.exp(1j * np.pi * (np.arange(1, m + 1) - 0.5) / m)
    lr = h * sym[:, None] + r[None, :]
    q = h * ((np.expm1(lr / 2) / lr).mean(axis=1)).real
    f1 = h * (((-4 - lr + np.exp(lr) * (4 - 3 * lr + lr**2)) / lr**3).mean(axis=1)).real
    f2 = h * (((2 + lr + np.exp(lr) * (lr - 2)) / lr**3).mean(axis=1)).real
    f3 = h * (((-4 - 3 * lr - lr**2 + np.exp(lr) * (4 - lr)) / lr**3).mean(axis=1)).real
    return e_full, e_half, q, f1, f2, f3


def _solve_etdrk4(pde, u0, grid, dealias, steps_per_sample=6):
    """Fixed-step ETDRK4 with the linear part handled exactly.

    The step size divides the output interval so samples land on step
    boundaries; the transient is an integer number of the same steps.
    """
    nx = grid.nx
    k = 2 * np.pi * np.arange(nx // 2 + 1) / grid.length
    mask = np.arange(nx // 2 + 1) <= nx // 3 if dealias else np.ones(nx // 2 + 1, bool)
    linear, nonlinear = _split_terms(pde.true_coeffs)
    sym = _linear_symbol(k, linear).real  # stiff benchmark symbols are real
    h = grid.dt / steps_per_sample
    n_transient = int(round(pde.transient / h))
    e_full, e_half, q, f1, f2, f3 = _etdrk4_coeffs(sym, h)

    def nl(v):
        return _nonlinear_rhs(v, k, mask, nonlinear, nx)

    v = np.fft.rfft(np.asarray(u0, float))
    out = np.empty((grid.nt, nx))
    total = n_transient + (grid.nt - 1) * steps_per_sample
    sample = 0
    for step in range(total + 1):
        if step >= n_transient and (step - n_transient) % steps_per_sample == 0:
            u = np.fft.irfft(v, n=nx)
            if not np.all(np.isfinite(u)):
                t = step * h - pde.transient
                raise SolverBlowUpError(f"{pde.name} blew up at step {step}, t={t:.4g}")
            out[sample] = u
            sample += 1
        if step == total:
            break
        nv = nl(v)
        a = e_half * v + q * nv
        na = nl(a)
        b = e_half * v + q * na
        nb = nl(b)
        c = e_half * a + q * (2 * nb - nv)
        nc = nl(c)
        v = e_full * v + f1 * nv + 2 * f2 * (na + nb) + f3 * nc
    return out


def _solve_rk45(pde, u0, grid, dealias):
    """Adaptive RK45 on phase-rotated Fourier coefficients.

    The imaginary (dispersive/advective) part of the linear symbol is
    absorbed into an exact integrating-factor rotation so the step size
    is set by the dynamics, not by high-wavenumber oscillation.
    """
    nx = grid.nx
    k = 2 * np.pi * np.arange(nx // 2 + 1) / grid.length
    mask = np.arange(nx // 2 + 1) <= nx // 3 if dealias else np.ones(nx // 2 + 1, bool)
    linear, nonlinear = _split_terms(pde.true_coeffs)
    sym = _linear_symbol(k, linear)
    omega = sym.imag
    decay = sym.real

    def rhs(t, v):
        rot = np.exp(1j * omega * t)
        dv = decay * v
        if nonlinear:
            dv = dv + _nonlinear_rhs(rot * v, k, mask, nonlinear, nx) / rot
        return dv

    t_eval = pde.transient + grid.t
    res = solve_ivp(
        rhs,
        (0.0, pde.transient + grid.t_end),
        np.fft.rfft(np.asarray(u0, float)).astype(complex),
        method="RK45",
        t_eval=t_eval,
        rtol=1e-7,
        atol=1e-9,
    )
    if not res.success:
        raise SolverBlowUpError(f"{pde.name} integration failed: {res.message}")
    uhat = res.y.T * np.exp(1j * omega[None, :] * t_eval[:, None])
    out = np.fft.irfft(uhat, n=nx)
    if not np.all(np.isfinite(out)):
        bad = int(np.argmax(~np.isfinite(out).all(axis=1)))
        raise SolverBlowUpError(
            f"{pde.name} blew up at sample {bad}, t={grid.t[bad]:.4g}"
        )
    return out


def solve(pde: PdeSpec, u0: np.ndarray, grid: Grid1D, dealias: bool = True) -> Trajectory:
    """Integrate a benchmark PDE from u0, sampling on the grid's nt output times.

    Stiff equations use fixed-step ETDRK4; the rest use adaptive RK45 on
    the Fourier coefficients (rtol 1e-7, atol 1e-9). Any configured
    transient is integrated and discarded before the first sample.
    """
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (grid.nx,):
        raise ValueError("u0 length must equal grid.nx")
    if pde.stiff:
        values = _solve_etdrk4(pde, u0, grid, dealias)
    else:
        values = _solve_rk45(pde, u0, grid, dealias)
    return Trajectory(grid, values)


def add_noise(traj: Trajectory, sigma: float, rng: np.random.Generator) -> Trajectory:
    """Additive Gaussian noise scaled by sigma times the field's standard deviation."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return traj
    scale = sigma * float(np.std(traj.values))
    noisy = traj.values + scale * rng.standard_normal(traj.values.shape)
    return Trajectory(traj.grid, noisy)


def generate_set(
    pde: PdeSpec, grid: Grid1D, m: int, sigma: float, seed: int, dealias: bool = True
) -> TrajectorySet:
    """Generate M trajectories; seed drives the solver ICs, seed+1000 the noise.

    Trajectory i uses substream (seed, i) for its initial condition and
    substream (seed+1000, i) for its noise realization.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    ic_stream = RngStream(seed)
    noise_stream = RngStream(seed + NOISE_SEED_OFFSET)
    trajs = []
    for i in range(m):
        u0 = initial_condition(pde, grid, ic_stream.generator(i))
        traj = solve(pde, u0, grid, dealias=dealias)
        trajs.append(add_noise(traj, sigma, noise_stream.generator(i)))
    return TrajectorySet(tuple(trajs))
