"""Independent ground truth: split-step evolution and Picard iteration.

Both solvers know nothing about trees or series tables, so they can arbitrate
the power-series machinery. The split-step solver works on a dense frequency
grid of modes |xi|_inf <= K via FFT round-trips; Strang splitting composes two
exact flows (the linear phase multiplication e^{i dt |xi|^2 / 2} in frequency
space and the pointwise rotation u <- u e^{i |u|^2 dt} in physical space,
which leaves |u| invariant), so the splitting itself is the only source of
time-stepping error and the scheme is second order in dt. Dealiasing is an
explicit guard, not a silent truncation: data here are sparse and runs short,
and a run that populates the top third of the grid should fail loudly.

In Wick mode the nonlinear rotation carries the renormalized phase
(|u|^2 - 2 avg |u|^2) dt; on a single plane wave a e^{ikx} this flips the
self-interaction, giving amplitude a e^{i t (|k|^2 - a^2)} instead of the
standard a e^{i t (|k|^2 + a^2)}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .duhamel import ProductFn, QuadratureSpec, _grid_duhamel, lwp_radius, trilinear_product
from .spectra import EPS_TRUNC, SparseSpectrum, add, fl_norm, propagate

#: Fraction of total L^2 mass allowed in the top third of the mode grid.
ALIAS_TOL = 1e-6


class AliasingError(RuntimeError):
    """Top-of-grid modes picked up mass; increase the cutoff K."""


class DivergenceError(RuntimeError):
    """Picard iterates stopped contracting; t is outside the contraction regime."""


@dataclass(frozen=True)
class DenseGrid:
    """Full complex coefficient array over the modes |xi|_inf <= K.

    values uses FFT ordering along every axis: index m holds mode m for
    m <= K and mode m - (2K+1) above, so mode xi lives at index xi mod (2K+1).
    """

    dim: int
    K: int
    values: np.ndarray

    @property
    def n(self) -> int:
        return 2 * self.K + 1

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass(frozen=True)
class StepperConfig:
    """dt = None means t / 2048; scheme is Strang splitting."""

    dt: Optional[float] = None
    scheme: str = "strang"
    wick: bool = False

    def __post_init__(self) -> None:
        if self.dt is not None and self.dt <= 0:
            raise ValueError("time step must be positive")
        if self.scheme != "strang":
            raise ValueError(f"unknown scheme {self.scheme!r}")


def to_dense(f: SparseSpectrum, K: int) -> DenseGrid:
    """Scatter a sparse spectrum onto the dense grid (lossless for |xi|_inf <= K)."""
    if K < 1:
        raise ValueError("cutoff K must be >= 1")
    if f.support_radius() > K:
        raise ValueError(
            f"support radius {f.support_radius()} exceeds cutoff K={K}"
        )
    n = 2 * K + 1
    values = np.zeros((n,) * f.dim, np.complex128)
    if len(f):
        values[tuple((f.coords % n).T)] = f.values
    return DenseGrid(dim=f.dim, K=K, values=values)


def from_dense(grid: DenseGrid, eps: float = EPS_TRUNC) -> SparseSpectrum:
    """Harvest dense coefficients with modulus >= eps back into a sparse spectrum."""
    flat = grid.values.reshape(-1)
    nz = np.flatnonzero(np.abs(flat) >= eps)
    if not nz.size:
        return SparseSpectrum.zero(grid.dim)
    idx = np.stack(np.unravel_index(nz, grid.values.shape), axis=1).astype(np.int64)
    coords = np.where(idx > grid.K, idx - grid.n, idx)
    return SparseSpectrum.build(grid.dim, coords, flat[nz])


def _mode_axes(K: int, dim: int) -> list[np.ndarray]:
    axis = np.concatenate([np.arange(0, K + 1), np.arange(-K, 0)]).astype(np.float64)
    out = []
    for q in range(dim):
        shape = [1] * dim
        shape[q] = 2 * K + 1
        out.append(axis.reshape(shape))
    return out


def evolve(u0: SparseSpectrum, t: float, cfg: StepperConfig, K: int) -> SparseSpectrum:
    """Split-step solution at time t of the cubic equation (Wick variant if
    cfg.wick) with datum u0, on the dense grid of cutoff K.

    Requires K >= 2 * support radius of u0 so the first cubic interactions
    stay far from the grid edge; the aliasing guard aborts the run if the top
    third of modes ever holds more than ALIAS_TOL of the mass.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    if K < max(1, 2 * u0.support_radius()):
        raise ValueError(
            f"cutoff K={K} below twice the data support radius "
            f"{u0.support_radius()}"
        )
    if t == 0 or not len(u0):
        return u0
    dt = cfg.dt if cfg.dt is not None else t / 2048.0
    steps = max(1, round(t / dt))
    h = t / steps

    n = 2 * K + 1
    spec = to_dense(u0, K).values
    axes = _mode_axes(K, u0.dim)
    xi_sq = sum(a**2 for a in axes)
    half = np.exp(0.5j * h * xi_sq)
    xi_inf = np.abs(axes[0])
    for a in axes[1:]:
        xi_inf = np.maximum(xi_inf, np.abs(a))
    top = xi_inf > (2.0 / 3.0) * K
    scale_fwd = float(n**u0.dim)

    for _ in range(steps):
        spec = spec * half
        u = np.fft.ifftn(spec) * scale_fwd
        mod_sq = u.real**2 + u.imag**2
        if cfg.wick:
            phase = h * (mod_sq - 2.0 * float(mod_sq.mean()))
        else:
            phase = h * mod_sq
        u = u * np.exp(1j * phase)
        spec = np.fft.fftn(u) / scale_fwd
        spec = spec * half
        total = float(np.sum(spec.real**2 + spec.imag**2))
        leaked = float(np.sum(spec.real[top] ** 2 + spec.imag[top] ** 2))
        if total > 0 and leaked > ALIAS_TOL * total:
            raise AliasingError(
                f"{leaked / total:.3e} of the mass sits above |xi|_inf = "
                f"{(2.0 / 3.0) * K:.1f}; increase K"
            )
    return from_dense(DenseGrid(dim=u0.dim, K=K, values=spec))


def picard_solve(
    u0: SparseSpectrum,
    t: float,
    iterations: int,
    quad: QuadratureSpec = QuadratureSpec(),
    product: ProductFn = trilinear_product,
) -> SparseSpectrum:
    """J-th Picard iterate P_J(t), where P_0 = S(t) u0 and
    P_j = S(t) u0 + I[P_{j-1}, P_{j-1}, P_{j-1}](t).

    Converges to the fixed point (the actual solution) for t below the
    contraction radius; agrees with the series partial sum through order J up
    to O(t^{J+1}). Iterates are tabulated on the quadrature grid so each
    iteration costs one grid Duhamel pass.
    """
    if iterations < 0:
        raise ValueError("iteration count must be nonnegative")
    radius = lwp_radius(u0)
    if not t < radius:
        raise ValueError(
            f"t={t} is outside the contraction regime (radius {radius:.3g})"
        )
    times = quad.grid(t)
    free = [propagate(u0, float(tm)) for tm in times]
    bound = 2.0 * fl_norm(u0, 1.0) + 1e-12
    cur = free
    for _ in range(iterations):
        integral = _grid_duhamel(cur, cur, cur, times, product)
        cur = [add(f, g) for f, g in zip(free, integral)]
        growth = fl_norm(cur[-1], 1.0)
        if growth > bound:
            raise DivergenceError(
                f"FL1 norm {growth:.3g} exceeded the contraction bound {bound:.3g}"
            )
    return cur[-1]
