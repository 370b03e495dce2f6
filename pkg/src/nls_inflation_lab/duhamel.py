"""Duhamel iterates and the power-series expansion of small cubic NLS data.

For i u_t - Delta u + |u|^2 u = 0 on the torus (defocusing sign, nonnegative
times) the trilinear Duhamel operator on Fourier coefficients is

    I[u1, u2, u3](t) = i * int_0^t S(t - t') [u1 conj(u2) u3](t') dt',

where S is the free propagator and the product is the convolution
out(xi) = sum_{xi = xi1 - xi2 + xi3} u1(xi1) conj(u2)(xi2) u3(xi3). Expanding
the solution with datum phi in powers of the data gives terms Xi_0 = S(t) phi
and, for j >= 1,

    Xi_j = sum_{j1 + j2 + j3 = j - 1} I[Xi_{j1}, Xi_{j2}, Xi_{j3}],

so Xi_j is a sum of #T(j) elementary integrals indexed by generation-j
ternary trees (psi_eval computes a single one).

Time integrals use the composite trapezoid rule on a uniform grid. Each
level's grid values are built with one cumulative pass in the interaction
picture H(t') = S(-t') [product](t'), so a full table up to generation J
costs O(M * #compositions) trilinear products, not O(M^2).

The Wick-ordered variant (nonlinearity (|u|^2 - 2 fint |u|^2) u) is obtained
by passing wick_trilinear_product as the product.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .spectra import (
    DEFAULT_SUPPORT_CAP,
    EPS_TRUNC,
    SparseSpectrum,
    SupportCapError,
    _box_strides,
    add,
    convolve,
    fl_norm,
    propagate,
    reflect_conj,
    scale,
)
from .trees import TernaryTree, compositions

ProductFn = Callable[[SparseSpectrum, SparseSpectrum, SparseSpectrum], SparseSpectrum]

#: Contraction coefficient in the local-existence radius kappa / ||u0||_1^2.
LWP_KAPPA = 1.0 / 16.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite trapezoid rule with `nodes` uniform subintervals of [0, t]."""

    nodes: int = 256

    def __post_init__(self) -> None:
        if self.nodes < 2:
            raise ValueError("quadrature needs at least 2 subintervals")

    def grid(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError("integration time must be nonnegative")
        return np.linspace(0.0, float(t), self.nodes + 1)


# ---------------------------------------------------------------------------
# trilinear products
# ---------------------------------------------------------------------------


def trilinear_product(
    f1: SparseSpectrum,
    f2: SparseSpectrum,
    f3: SparseSpectrum,
    eps: float = EPS_TRUNC,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> SparseSpectrum:
    """Fourier coefficients of u1 * conj(u2) * u3."""
    return convolve(convolve(f1, reflect_conj(f2), eps, cap), f3, eps, cap)


def _paired_sum(f: SparseSpectrum, g: SparseSpectrum) -> complex:
    """sum over the common support of conj(f(xi)) * g(xi)."""
    if not len(f) or not len(g):
        return 0.0 + 0.0j
    lo = np.minimum(f.coords.min(axis=0), g.coords.min(axis=0))
    hi = np.maximum(f.coords.max(axis=0), g.coords.max(axis=0))
    shape = hi - lo + 1
    if int(np.prod([int(s) for s in shape], dtype=object)) > 2**62:
        fv = {pt: v for pt, v in f}
        return sum(np.conj(fv[pt]) * v for pt, v in g if pt in fv) + 0.0j
    strides = _box_strides(shape)
    idx_f = (f.coords - lo) @ strides
    idx_g = (g.coords - lo) @ strides
    _, sel_f, sel_g = np.intersect1d(idx_f, idx_g, assume_unique=True, return_indices=True)
    if not sel_f.size:
        return 0.0 + 0.0j
    return complex(np.sum(np.conj(f.values[sel_f]) * g.values[sel_g]))


def wick_trilinear_product(
    f1: SparseSpectrum,
    f2: SparseSpectrum,
    f3: SparseSpectrum,
    eps: float = EPS_TRUNC,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> SparseSpectrum:
    """Coefficients of the Wick-ordered product: u1 conj(u2) u3 with the two
    pair diagonals removed.

    Subtracting (sum conj(f2) f3) f1 + (sum f1 conj(f2)) f3 cancels the xi1 = xi2
    and xi3 = xi2 pairings, which is exactly how the renormalized nonlinearity
    (|u|^2 - 2 fint |u|^2) u acts in Fourier variables. For a single plane wave
    a e^{i k x} it gives -|a|^2 a e^{i k x}.
    """
    out = trilinear_product(f1, f2, f3, eps, cap)
    c1 = _paired_sum(f2, f3)
    c2 = np.conj(_paired_sum(f1, f2))
    if c1 != 0:
        out = add(out, scale(f1, -c1))
    if c2 != 0:
        out = add(out, scale(f3, -c2))
    return out


# ---------------------------------------------------------------------------
# Duhamel integrals on a time grid
# ---------------------------------------------------------------------------


def _grid_duhamel(
    g1: Sequence[SparseSpectrum],
    g2: Sequence[SparseSpectrum],
    g3: Sequence[SparseSpectrum],
    times: np.ndarray,
    product: ProductFn,
) -> list[SparseSpectrum]:
    """Grid values of I[u1, u2, u3] from grid values of the three children.

    Uses the interaction picture: with H(t') = S(-t') [product](t') and C_m the
    cumulative trapezoid of H up to t_m, I(t_m) = i S(t_m) C_m.
    """
    dim = g1[0].dim
    out = [SparseSpectrum.zero(dim)]
    cum = SparseSpectrum.zero(dim)
    prev = propagate(product(g1[0], g2[0], g3[0]), -float(times[0]))
    for m in range(1, len(times)):
        cur = propagate(product(g1[m], g2[m], g3[m]), -float(times[m]))
        h = float(times[m] - times[m - 1])
        cum = add(cum, scale(add(prev, cur), 0.5 * h))
        out.append(scale(propagate(cum, float(times[m])), 1j))
        prev = cur
    return out


def duhamel_integral(
    u1: Callable[[float], SparseSpectrum],
    u2: Callable[[float], SparseSpectrum],
    u3: Callable[[float], SparseSpectrum],
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
    product: ProductFn = trilinear_product,
) -> SparseSpectrum:
    """I[u1, u2, u3](t) for time-dependent children given as callables."""
    times = quad.grid(t)
    g1 = [u1(float(tm)) for tm in times]
    g2 = [u2(float(tm)) for tm in times]
    g3 = [u3(float(tm)) for tm in times]
    return _grid_duhamel(g1, g2, g3, times, product)[-1]


# ---------------------------------------------------------------------------
# power-series tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesTable:
    """Grid values terms[j][m] = Xi_j(t_m) of the first J + 1 series terms."""

    phi: SparseSpectrum
    t: float
    times: np.ndarray
    terms: tuple[tuple[SparseSpectrum, ...], ...]

    @property
    def J(self) -> int:
        return len(self.terms) - 1

    def term(self, j: int, m: int = -1) -> SparseSpectrum:
        return self.terms[j][m]

    def grid_index(self, target: float) -> int:
        """Index of the grid node nearest to target (grid is uniform)."""
        M = len(self.times) - 1
        if self.t == 0:
            return M
        return min(M, max(0, round(target / self.t * M)))


def build_series(
    phi: SparseSpectrum,
    J: int,
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
    product: ProductFn = trilinear_product,
) -> SeriesTable:
    """Tabulate Xi_0 ... Xi_J for datum phi on the quadrature grid of [0, t]."""
    if J < 0:
        raise ValueError("series order must be nonnegative")
    times = quad.grid(t)
    levels: list[list[SparseSpectrum]] = [
        [propagate(phi, float(tm)) for tm in times]
    ]
    zero = SparseSpectrum.zero(phi.dim)
    for j in range(1, J + 1):
        integrand = [zero] * len(times)
        for j1, j2, j3 in compositions(j - 1):
            for m in range(len(times)):
                w = product(levels[j1][m], levels[j2][m], levels[j3][m])
                if len(w):
                    integrand[m] = add(integrand[m], propagate(w, -float(times[m])))
        level = [zero]
        cum = zero
        for m in range(1, len(times)):
            h = float(times[m] - times[m - 1])
            cum = add(cum, scale(add(integrand[m - 1], integrand[m]), 0.5 * h))
            level.append(scale(propagate(cum, float(times[m])), 1j))
        levels.append(level)
    return SeriesTable(
        phi=phi, t=float(t), times=times, terms=tuple(tuple(lv) for lv in levels)
    )


def partial_sum(table: SeriesTable, upto: int | None = None, m: int = -1) -> SparseSpectrum:
    """sum_{j <= upto} Xi_j at grid node m (defaults: all levels, final time)."""
    if upto is None:
        upto = table.J
    if not 0 <= upto <= table.J:
        raise ValueError(f"series order {upto} outside tabulated range 0..{table.J}")
    out = table.terms[0][m]
    for j in range(1, upto + 1):
        out = add(out, table.terms[j][m])
    return out


def psi_eval(
    tree: TernaryTree,
    leaves: Sequence[SparseSpectrum],
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
    product: ProductFn = trilinear_product,
) -> SparseSpectrum:
    """Elementary Duhamel integral of one ternary tree.

    leaves are consumed left to right (2j + 1 of them for a generation-j
    tree); a leaf contributes S(t') of its datum, an internal node the
    trilinear Duhamel integral of its children. Summing over all trees of
    generation j with every leaf equal to phi reproduces Xi_j.
    """
    leaves = list(leaves)
    if len(leaves) != tree.leaf_count:
        raise ValueError(
            f"tree of generation {tree.generation} needs {tree.leaf_count} leaves, "
            f"got {len(leaves)}"
        )
    times = quad.grid(t)
    it = iter(leaves)

    def grid_of(node: TernaryTree) -> list[SparseSpectrum]:
        if node.children is None:
            phi = next(it)
            return [propagate(phi, float(tm)) for tm in times]
        c1, c2, c3 = node.children
        return _grid_duhamel(grid_of(c1), grid_of(c2), grid_of(c3), times, product)

    return grid_of(tree)[-1]


def xi_diff(
    u0: SparseSpectrum,
    phi: SparseSpectrum,
    j: int,
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
    product: ProductFn = trilinear_product,
) -> SparseSpectrum:
    """Xi_j(u0 + phi)(t) - Xi_j(phi)(t), both on the same quadrature grid.

    Equals the sum of elementary integrals over generation-j trees with at
    least one leaf carrying u0 (multilinear expansion of the perturbed datum).
    """
    s_sum = build_series(add(u0, phi), j, t, quad, product)
    s_phi = build_series(phi, j, t, quad, product)
    return s_sum.term(j) - s_phi.term(j)


# ---------------------------------------------------------------------------
# first term in closed form
# ---------------------------------------------------------------------------


def phase_kernel(omega: float, t: float) -> complex:
    """K(omega, t) = int_0^t e^{-i t' omega} dt' = (1 - e^{-i t omega})/(i omega).

    Continuous at omega = 0 with value t; that branch is taken for
    |omega| < OMEGA_TOL. Re K / t = sinc(t omega) >= 0 whenever |t omega| <= pi.
    """
    if abs(omega) < kernels.OMEGA_TOL:
        return complex(t)
    return (1.0 - cmath.exp(-1j * t * omega)) / (1j * omega)


@dataclass(frozen=True)
class ResonancePhase:
    """One interaction xi = xi1 - xi2 + xi3 and its resonance factor."""

    xi: tuple[int, ...]
    xi1: tuple[int, ...]
    xi2: tuple[int, ...]
    xi3: tuple[int, ...]

    def __post_init__(self) -> None:
        lhs = tuple(a - b + c for a, b, c in zip(self.xi1, self.xi2, self.xi3))
        if tuple(self.xi) != lhs:
            raise ValueError(f"xi must equal xi1 - xi2 + xi3, got {self.xi} vs {lhs}")

    @property
    def omega(self) -> int:
        """|xi|^2 - |xi1|^2 + |xi2|^2 - |xi3|^2; always an even integer."""
        sq = lambda p: sum(c * c for c in p)
        return sq(self.xi) - sq(self.xi1) + sq(self.xi2) - sq(self.xi3)

    @property
    def omega_factored(self) -> int:
        """The same number via 2 (xi1 - xi2) . (xi3 - xi2)."""
        return 2 * sum(
            (a - b) * (c - b) for a, b, c in zip(self.xi1, self.xi2, self.xi3)
        )

    def kernel(self, t: float) -> complex:
        return phase_kernel(float(self.omega), t)


def xi1_exact(
    phi: SparseSpectrum,
    t: float,
    eps: float = EPS_TRUNC,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> SparseSpectrum:
    """Xi_1(t) without quadrature, for a time-independent first generation.

    F[Xi_1](xi, t) = i e^{i t |xi|^2} sum_{xi = xi1 - xi2 + xi3}
                     K(omega, t) phi(xi1) conj(phi(xi2)) phi(xi3),
    with omega = 2 (xi1 - xi2) . (xi3 - xi2) the resonance phase. The triple
    loop is a compiled kernel; the quadrature engine must agree with this up
    to its trapezoid error.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    if not len(phi):
        return phi
    lo, hi = phi.bounding_box()
    out_lo = lo - hi + lo
    out_hi = hi - lo + hi
    shape = out_hi - out_lo + 1
    volume = int(np.prod([int(s) for s in shape], dtype=object))
    if volume > cap:
        raise SupportCapError(
            f"first-term bounding box has {volume} cells (cap {cap})"
        )
    strides = _box_strides(shape)
    idx1 = (phi.coords - lo) @ strides
    idx2n = (hi - phi.coords) @ strides
    acc = np.zeros(volume, np.complex128)
    kernels.xi1_accumulate(
        phi.coords, phi.values, phi.coords, phi.values, phi.coords, phi.values,
        idx1, idx2n, idx1, float(t), acc,
    )
    nz = np.flatnonzero(np.abs(acc) >= eps)
    if not nz.size:
        return SparseSpectrum.zero(phi.dim)
    coords = np.stack(np.unravel_index(nz, tuple(int(s) for s in shape)), axis=1)
    coords = coords.astype(np.int64) + out_lo
    g = SparseSpectrum._trusted(phi.dim, coords, acc[nz])
    return scale(propagate(g, float(t)), 1j)


def xi1_phase_stats(phi: SparseSpectrum, t: float) -> tuple[float, float]:
    """(max |t omega|, min Re K(omega, t)/t) over all interaction triples.

    The second value is min sinc(t omega); it stays >= 1/2 when every phase
    satisfies |t omega| <= 2, which is the regime where no cancellation can
    occur in the first term.
    """
    if not len(phi):
        return 0.0, 1.0
    return kernels.xi1_phase_stats(phi.coords, phi.coords, phi.coords, float(t))


def lwp_radius(u0: SparseSpectrum, kappa: float = LWP_KAPPA) -> float:
    """Time radius kappa / ||u0||_{FL^1}^2 on which the series converges
    geometrically (infinite for the zero datum)."""
    n1 = fl_norm(u0, 1.0)
    if n1 == 0.0:
        return math.inf
    return kappa / (n1 * n1)
