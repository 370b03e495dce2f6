"""Sparse Fourier spectra on the integer lattice and their norms.

A state is a finitely supported map Z^d -> C holding the Fourier coefficients
of a torus function; physical space is never materialized here. The free
Schrodinger propagator acts diagonally as multiplication by e^{i t |xi|^2}
(unit-dispersion convention: the 2*pi of the torus is absorbed into time).

All reductions go through numpy's pairwise summation on a canonically ordered
support, so every norm is reproducible to well below 1e-12 between runs and
backends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from . import kernels

#: Entries with modulus below this are dropped after every arithmetic step.
EPS_TRUNC = 1e-14

#: Cap on dense accumulator cells for a single convolution (resource guard).
DEFAULT_SUPPORT_CAP = 1 << 24

LatticePoint = tuple[int, ...]


class SupportCapError(RuntimeError):
    """Support growth exceeded the configured bounding-box cell cap."""


def _canonical_order(coords: np.ndarray) -> np.ndarray:
    # lexicographic: first coordinate is the primary key
    return np.lexsort(coords.T[::-1])


@dataclass(frozen=True, eq=False)
class SparseSpectrum:
    """Finitely supported Fourier coefficients on Z^dim.

    coords is (n, dim) int64 in lexicographic order, values is (n,) complex128
    with every modulus >= EPS_TRUNC. Instances are immutable; arithmetic
    returns new spectra.
    """

    dim: int
    coords: np.ndarray
    values: np.ndarray

    # -- construction -------------------------------------------------------

    @staticmethod
    def _trusted(dim: int, coords: np.ndarray, values: np.ndarray) -> "SparseSpectrum":
        """Wrap arrays already canonical (sorted, unique, truncated)."""
        return SparseSpectrum(dim, coords, values)

    @classmethod
    def build(cls, dim: int, coords, values, eps: float = EPS_TRUNC) -> "SparseSpectrum":
        """Canonicalize arbitrary (coords, values) arrays: sort, merge, truncate."""
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, dim)
        values = np.asarray(values, dtype=np.complex128).ravel()
        if coords.shape[0] != values.size:
            raise ValueError("coords/values length mismatch")
        if values.size == 0:
            return cls._trusted(dim, np.empty((0, dim), np.int64), np.empty(0, np.complex128))
        uniq, inverse = np.unique(coords, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        merged = np.zeros(uniq.shape[0], np.complex128)
        merged.real = np.bincount(inverse, weights=values.real, minlength=uniq.shape[0])
        merged.imag = np.bincount(inverse, weights=values.imag, minlength=uniq.shape[0])
        keep = np.abs(merged) >= eps
        return cls._trusted(dim, uniq[keep], merged[keep])

    @classmethod
    def from_entries(
        cls,
        dim: int,
        entries: Union[Mapping[LatticePoint, complex], Iterable[tuple[LatticePoint, complex]]],
        eps: float = EPS_TRUNC,
    ) -> "SparseSpectrum":
        items = entries.items() if isinstance(entries, Mapping) else list(entries)
        pts = [pt for pt, _ in items]
        vals = [v for _, v in items]
        return cls.build(dim, np.array(pts, np.int64).reshape(-1, dim), vals, eps=eps)

    @classmethod
    def zero(cls, dim: int) -> "SparseSpectrum":
        return cls._trusted(dim, np.empty((0, dim), np.int64), np.empty(0, np.complex128))

    @classmethod
    def single(cls, point: Sequence[int], amplitude: complex) -> "SparseSpectrum":
        return cls.build(len(point), [tuple(point)], [amplitude])

    # -- accessors -----------------------------------------------------------

    def __len__(self) -> int:
        return self.values.size

    def __iter__(self) -> Iterator[tuple[LatticePoint, complex]]:
        for pt, v in zip(self.coords, self.values):
            yield tuple(int(c) for c in pt), complex(v)

    def entries(self) -> dict[LatticePoint, complex]:
        return dict(self)

    def amplitude(self, point: Sequence[int]) -> complex:
        """Coefficient at one lattice point (0 outside the support)."""
        pt = np.asarray(point, np.int64)
        hit = np.flatnonzero(np.all(self.coords == pt, axis=1))
        return complex(self.values[hit[0]]) if hit.size else 0.0 + 0.0j

    def support_radius(self) -> int:
        """max |xi|_inf over the support (0 for the zero spectrum)."""
        if not len(self):
            return 0
        return int(np.abs(self.coords).max())

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if not len(self):
            z = np.zeros(self.dim, np.int64)
            return z, z - 1
        return self.coords.min(axis=0), self.coords.max(axis=0)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "SparseSpectrum") -> "SparseSpectrum":
        return add(self, other)

    def __sub__(self, other: "SparseSpectrum") -> "SparseSpectrum":
        return add(self, scale(other, -1.0))

    def __mul__(self, c: complex) -> "SparseSpectrum":
        return scale(self, c)

    __rmul__ = __mul__

    def __neg__(self) -> "SparseSpectrum":
        return scale(self, -1.0)


# ---------------------------------------------------------------------------
# arithmetic helpers
# ---------------------------------------------------------------------------


def _check_dims(f: SparseSpectrum, g: SparseSpectrum) -> None:
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")


def add(f: SparseSpectrum, g: SparseSpectrum) -> SparseSpectrum:
    _check_dims(f, g)
    if not len(f):
        return g
    if not len(g):
        return f
    coords = np.concatenate([f.coords, g.coords])
    values = np.concatenate([f.values, g.values])
    return SparseSpectrum.build(f.dim, coords, values)


def scale(f: SparseSpectrum, c: complex) -> SparseSpectrum:
    if c == 0:
        return SparseSpectrum.zero(f.dim)
    vals = f.values * c
    keep = np.abs(vals) >= EPS_TRUNC
    if keep.all():
        return SparseSpectrum._trusted(f.dim, f.coords, vals)
    return SparseSpectrum._trusted(f.dim, f.coords[keep], vals[keep])


def reflect_conj(f: SparseSpectrum) -> SparseSpectrum:
    """F[conj(u)](xi) = conj(F[u](-xi)); needed for conjugated product slots."""
    if not len(f):
        return f
    coords = -f.coords
    order = _canonical_order(coords)
    return SparseSpectrum._trusted(f.dim, coords[order], np.conj(f.values)[order])


def propagate(f: SparseSpectrum, t: float) -> SparseSpectrum:
    """Free propagator S(t): multiply each mode by e^{i t |xi|^2}. Unitary on H^s."""
    if not len(f) or t == 0.0:
        return f
    xi_sq = np.einsum("nq,nq->n", f.coords, f.coords).astype(np.float64)
    return SparseSpectrum._trusted(f.dim, f.coords, f.values * np.exp(1j * t * xi_sq))


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def fl_norm(f: SparseSpectrum, p: float = 1.0) -> float:
    """Fourier-Lebesgue norm (sum |coef|^p)^(1/p); p = inf gives the sup."""
    if p != math.inf and p < 1:
        raise ValueError("fl_norm requires p >= 1")
    a = np.abs(f.values)
    if not a.size:
        return 0.0
    if p == math.inf:
        return float(a.max())
    if p == 1.0:
        return float(a.sum())
    if p == 2.0:
        return float(math.sqrt(np.sum(a * a)))
    return float(np.sum(a**p) ** (1.0 / p))


def sobolev_norm(f: SparseSpectrum, s: float) -> float:
    """H^s norm with Japanese-bracket weight <xi> = (1 + |xi|^2)^(1/2)."""
    if not len(f):
        return 0.0
    xi_sq = np.einsum("nq,nq->n", f.coords, f.coords).astype(np.float64)
    w = (1.0 + xi_sq) ** s
    a2 = f.values.real**2 + f.values.imag**2
    return float(math.sqrt(np.sum(w * a2)))


def l2_norm(f: SparseSpectrum) -> float:
    """L^2 norm of the state; equals fl_norm(f, 2) by Plancherel."""
    return fl_norm(f, 2.0)


@dataclass(frozen=True)
class NormSpec:
    """A named norm: FL(p), H^s, or L2 (the latter = FL(2) by Plancherel)."""

    kind: str  # "fl" | "sobolev" | "l2"
    param: float = 0.0

    @classmethod
    def fl(cls, p: float) -> "NormSpec":
        return cls("fl", p)

    @classmethod
    def sobolev(cls, s: float) -> "NormSpec":
        return cls("sobolev", s)

    @classmethod
    def l2(cls) -> "NormSpec":
        return cls("l2")

    def evaluate(self, f: SparseSpectrum) -> float:
        if self.kind == "fl":
            return fl_norm(f, self.param)
        if self.kind == "sobolev":
            return sobolev_norm(f, self.param)
        if self.kind == "l2":
            return l2_norm(f)
        raise ValueError(f"unknown norm kind {self.kind!r}")


# ---------------------------------------------------------------------------
# convolution (the hot path) and cube data
# ---------------------------------------------------------------------------


def _box_strides(shape: np.ndarray) -> np.ndarray:
    strides = np.ones(shape.size, np.int64)
    for q in range(shape.size - 2, -1, -1):
        strides[q] = strides[q + 1] * shape[q + 1]
    return strides


def _encode(coords: np.ndarray, lo: np.ndarray, strides: np.ndarray) -> np.ndarray:
    return (coords - lo) @ strides


def convolve(
    f: SparseSpectrum,
    g: SparseSpectrum,
    eps: float = EPS_TRUNC,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> SparseSpectrum:
    """Discrete convolution out(xi) = sum_eta f(eta) g(xi - eta).

    Scatter-add over the Minkowski-sum bounding box; entries below eps are
    dropped from the result. Raises SupportCapError when the box exceeds cap.
    """
    _check_dims(f, g)
    if not len(f) or not len(g):
        return SparseSpectrum.zero(f.dim)
    lo_f, hi_f = f.bounding_box()
    lo_g, hi_g = g.bounding_box()
    lo, hi = lo_f + lo_g, hi_f + hi_g
    shape = hi - lo + 1
    volume = int(np.prod([int(s) for s in shape], dtype=object))
    if volume > cap:
        raise SupportCapError(
            f"convolution bounding box has {volume} cells (cap {cap})"
        )
    strides = _box_strides(shape)
    idx_f = _encode(f.coords, lo_f, strides)
    idx_g = _encode(g.coords, lo_g, strides)
    acc = np.zeros(volume, np.complex128)
    kernels.accumulate_products(idx_f, f.values, idx_g, g.values, acc)
    nz = np.flatnonzero(np.abs(acc) >= eps)
    if not nz.size:
        return SparseSpectrum.zero(f.dim)
    coords = np.stack(np.unravel_index(nz, tuple(int(s) for s in shape)), axis=1)
    coords = coords.astype(np.int64) + lo
    # flat index order over the box is already lexicographic in coords
    return SparseSpectrum._trusted(f.dim, coords, acc[nz])


def cube_indicator(center: Sequence[int], side: int, amplitude: complex = 1.0) -> SparseSpectrum:
    """amplitude * 1_{center + Q_A} with Q_A = [-A/2, A/2)^d; exactly A^d points."""
    if side < 1:
        raise ValueError("cube side must be a positive integer")
    center = tuple(int(c) for c in center)
    dim = len(center)
    axis = np.arange(-(side // 2), (side + 1) // 2, dtype=np.int64)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    coords = np.stack(grids, axis=-1).reshape(-1, dim) + np.asarray(center, np.int64)
    values = np.full(coords.shape[0], complex(amplitude), np.complex128)
    if abs(complex(amplitude)) < EPS_TRUNC:
        return SparseSpectrum.zero(dim)
    return SparseSpectrum._trusted(dim, coords, values)


# ---------------------------------------------------------------------------
# plain-text serialization
# ---------------------------------------------------------------------------


def write_spectrum(f: SparseSpectrum, fh: IO[str]) -> None:
    """Text format: '# d=<dim>' header, then one 'xi_1 .. xi_d re im' per line."""
    fh.write(f"# d={f.dim}\n")
    for pt, v in f:
        fields = [str(c) for c in pt] + [repr(v.real), repr(v.imag)]
        fh.write(" ".join(fields) + "\n")


def write_spectrum_path(f: SparseSpectrum, path) -> None:
    with open(path, "w") as fh:
        write_spectrum(f, fh)


def read_spectrum(fh: IO[str]) -> SparseSpectrum:
    dim = None
    pts: list[tuple[int, ...]] = []
    vals: list[complex] = []
    for raw in fh:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if dim is None and body.startswith("d="):
                dim = int(body[2:])
            continue
        if dim is None:
            raise ValueError("spectrum file must start with a '# d=<dim>' header")
        parts = line.split()
        if len(parts) != dim + 2:
            raise ValueError(f"expected {dim + 2} fields, got {len(parts)}: {line!r}")
        pts.append(tuple(int(p) for p in parts[:dim]))
        vals.append(float(parts[dim]) + 1j * float(parts[dim + 1]))
    if dim is None:
        raise ValueError("missing '# d=<dim>' header")
    if not pts:
        return SparseSpectrum.zero(dim)
    return SparseSpectrum.build(dim, np.array(pts, np.int64), vals)


def read_spectrum_path(path) -> SparseSpectrum:
    with open(path) as fh:
        return read_spectrum(fh)
