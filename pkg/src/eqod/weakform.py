"""Weak-form linear systems built from compactly supported bump test functions.

Each test function is a tensor product of 1D bumps centered on a margin-
shrunk grid of (t_c, x_c) points. The time derivative is moved onto the
test function analytically, so the response vector never differentiates
the data in time.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import Grid1D, TrajectorySet
from .oplib import LibrarySpec, evaluate_term

__all__ = ["bump", "bump_dt", "TestGrid", "make_test_grid", "WeakSystem", "assemble"]

MARGIN = 1.05  # center-to-boundary clearance, in radii


def bump(r) -> np.ndarray:
    """C-infinity bump profile exp(-1/(1-r^2)) on |r| < 1, zero outside."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out if out.ndim else float(out)


def bump_dt(r) -> np.ndarray:
    """Analytic derivative of the bump profile: -2r/(1-r^2)^2 * bump(r)."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1
    ri = r[inside]
    out[inside] = -2.0 * ri / (1.0 - ri**2) ** 2 * np.exp(-1.0 / (1.0 - ri**2))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TestGrid:
    """Bump centers and radii for one weak-form assembly."""

    t_centers: np.ndarray
    x_centers: np.ndarray
    r_t: float
    r_x: float

    @property
    def n_centers(self) -> int:
        return len(self.t_centers) * len(self.x_centers)


def make_test_grid(grid: Grid1D, n_t: int, n_x: int) -> TestGrid:
    """Place n_t x n_x bump centers with boundary margins.

    Radii: r_t = max(0.18 * T_range, 8 dt) and r_x = max(0.20 * X_range,
    8 dx). Centers are inclusive linspaces over the margin-shrunk
    intervals.
    """
    t_range = grid.t_end - grid.t_start
    r_t = max(0.18 * t_range, 8 * grid.dt)
    r_x = max(0.20 * grid.length, 8 * grid.dx)
    t_lo, t_hi = grid.t_start + MARGIN * r_t, grid.t_end - MARGIN * r_t
    x_lo, x_hi = grid.x0 + MARGIN * r_x, grid.x0 + grid.length - MARGIN * r_x
    if t_lo >= t_hi or x_lo >= x_hi:
        min_nt = int(np.ceil(2 * MARGIN * 8 / (1 - 2 * MARGIN * 0.18))) + 1
        min_nx = int(np.ceil(2 * MARGIN * 8 / (1 - 2 * MARGIN * 0.20)))
        raise ValueError(
            f"grid too small for test-function margins; need roughly "
            f"nt >= {min_nt} and nx >= {min_nx}"
        )
    return TestGrid(np.linspace(t_lo, t_hi, n_t), np.linspace(x_lo, x_hi, n_x), r_t, r_x)


@dataclass(frozen=True)
class WeakSystem:
    """Design matrix, response, and per-row provenance of a weak-form system."""

    theta: np.ndarray
    b: np.ndarray
    spec: LibrarySpec
    row_meta: tuple  # (trajectory index, t_c, x_c) per row

    @property
    def shape(self):
        return self.theta.shape

    def restricted(self, spec: LibrarySpec) -> "WeakSystem":
        """Column subset for a sub-library, preserving rows."""
        cols = [self.spec.index(t) for t in spec.terms]
        return WeakSystem(self.theta[:, cols], self.b, spec, self.row_meta)

    def to_csv(self) -> str:
        """Debug dump: row_meta columns, then one column per term, then b."""
        buf = io.StringIO()
        buf.write("trajectory,t_c,x_c," + ",".join(self.spec.tags) + ",b\n")
        for (m, tc, xc), row, bm in zip(self.row_meta, self.theta, self.b):
            vals = ",".join(repr(v) for v in row)
            buf.write(f"{m},{tc!r},{xc!r},{vals},{bm!r}\n")
        return buf.getvalue()


def _support_slice(centers, c, r, n):
    """Index range covering [c - r, c + r] plus one zero sample on each side."""
    inside = np.nonzero(np.abs(centers - c) <= r)[0]
    lo = max(int(inside[0]) - 1, 0)
    hi = min(int(inside[-1]) + 1, n - 1)
    return lo, hi + 1


def assemble(trajset: TrajectorySet, spec: LibrarySpec, tg: TestGrid) -> WeakSystem:
    """Build the weak-form system (Theta, b) for a trajectory set.

    Per trajectory and bump center, one row with b = -integral of
    u * dphi/dt and Theta_j = integral of theta_j(u) * phi, both by the
    trapezoidal rule restricted to the bump's support rectangle. Library
    fields are evaluated once per trajectory and reused across centers.
    """
    grid = trajset.grid
    if tg.r_t < 2 * grid.dt or tg.r_x < 2 * grid.dx:
        raise ValueError("test-function radius below two grid cells")
    t, x = grid.t, grid.x
    dxdt = grid.dx * grid.dt
    rows_theta, rows_b, meta = [], [], []
    for m, traj in enumerate(trajset):
        fields = np.stack([evaluate_term(traj, term) for term in spec.terms])
        u = traj.values
        for tc in tg.t_centers:
            i0, i1 = _support_slice(t, tc, tg.r_t, grid.nt)
            phi_t = bump((t[i0:i1] - tc) / tg.r_t)
            dphi_t = bump_dt((t[i0:i1] - tc) / tg.r_t) / tg.r_t
            for xc in tg.x_centers:
                j0, j1 = _support_slice(x, xc, tg.r_x, grid.nx)
                phi_x = bump((x[j0:j1] - xc) / tg.r_x)
                w = np.outer(phi_t, phi_x)
                w_t = np.outer(dphi_t, phi_x)
                block = fields[:, i0:i1, j0:j1]
                rows_theta.append(dxdt * np.einsum("kij,ij->k", block, w))
                rows_b.append(-dxdt * float(np.sum(u[i0:i1, j0:j1] * w_t)))
                meta.append((m, float(tc), float(xc)))
    return WeakSystem(np.array(rows_theta), np.array(rows_b), spec, tuple(meta))
