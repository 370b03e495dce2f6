"""Hot numeric kernels behind the sparse-spectrum operations.

Everything here works on *encoded* supports: a lattice point is mapped to a
flat nonnegative int64 index inside a bounding box, so a pairwise convolution
is a scatter-add ``acc[idx1[i] + idx2[k]] += v1[i] * v2[k]`` over a dense
accumulator. Two interchangeable backends are provided:

* a numba ``@njit`` path (default whenever numba imports cleanly), and
* a vectorized pure-numpy path.

Set the environment variable ``NLS_LAB_NO_NUMBA=1`` to force the numpy path;
if numba is not installed the numpy path is used silently. Both backends are
importable by name so they can be benchmarked against each other
(see ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import os

import numpy as np

# Phase kernel branch threshold: omega is an even integer in exact arithmetic,
# so anything below this is the resonant omega == 0 case.
OMEGA_TOL = 1e-12

_ENV_FLAG = "NLS_LAB_NO_NUMBA"


def _env_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip() not in ("", "0")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def backend() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

# Chunk size (in scattered products) for the numpy paths; bounds peak memory.
_CHUNK = 1 << 21


def _bincount_accumulate(acc: np.ndarray, idx: np.ndarray, vals: np.ndarray) -> None:
    acc.real += np.bincount(idx, weights=vals.real, minlength=acc.size)
    acc.imag += np.bincount(idx, weights=vals.imag, minlength=acc.size)


def accumulate_products_numpy(idx1, v1, idx2, v2, acc) -> None:
    """acc[idx1[i] + idx2[k]] += v1[i] * v2[k] for all pairs (i, k)."""
    n2 = idx2.size
    if n2 == 0 or idx1.size == 0:
        return
    step = max(1, _CHUNK // n2)
    for lo in range(0, idx1.size, step):
        hi = min(lo + step, idx1.size)
        idx = (idx1[lo:hi, None] + idx2[None, :]).ravel()
        vals = (v1[lo:hi, None] * v2[None, :]).ravel()
        _bincount_accumulate(acc, idx, vals)


def xi1_accumulate_numpy(c1, v1, c2, v2, c3, v3, idx1, idx2n, idx3, t, acc) -> None:
    """Scatter i*K(omega,t)*v1*conj(v2)*v3 over all triples into acc.

    idx2n must encode the *negated* middle argument so that
    idx1[i] + idx2n[k] + idx3[m] is the flat index of xi1 - xi2 + xi3.
    The leading factor i and the propagator e^{it|xi|^2} are applied by the
    caller; this kernel only accumulates K(omega,t) * amplitudes.
    """
    if v1.size == 0 or v2.size == 0 or v3.size == 0:
        return
    c23 = c2 @ c3.T  # (n2, n3) integer dot products
    s2 = np.einsum("kq,kq->k", c2, c2)
    d_idx = idx2n[:, None] + idx3[None, :]
    v2c = np.conj(v2)
    for i in range(v1.size):
        a = c3 @ c1[i]  # (n3,)
        b = c2 @ c1[i]  # (n2,)
        omega = 2.0 * (a[None, :] - b[:, None] - c23 + s2[:, None])
        phase = t * omega
        with np.errstate(divide="ignore", invalid="ignore"):
            k = (1.0 - np.exp(-1j * phase)) / (1j * omega)
        k[np.abs(omega) < OMEGA_TOL] = t
        vals = ((v1[i] * v2c)[:, None] * v3[None, :] * k).ravel()
        _bincount_accumulate(acc, (idx1[i] + d_idx).ravel(), vals)


def xi1_phase_stats_numpy(c1, c2, c3, t):
    """(max |t*omega|, min Re K(omega,t)/t) over all support triples."""
    c23 = c2 @ c3.T
    s2 = np.einsum("kq,kq->k", c2, c2)
    max_tw = 0.0
    min_re = np.inf
    for i in range(c1.shape[0]):
        a = c3 @ c1[i]
        b = c2 @ c1[i]
        tw = t * 2.0 * (a[None, :] - b[:, None] - c23 + s2[:, None])
        atw = np.abs(tw)
        max_tw = max(max_tw, float(atw.max()))
        # Re K / t = sinc(t*omega); the omega == 0 branch gives exactly 1.
        small = atw < OMEGA_TOL
        re = np.where(small, 1.0, np.sin(tw) / np.where(small, 1.0, tw))
        min_re = min(min_re, float(re.min()))
    return max_tw, min_re


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _accumulate_products_jit(idx1, v1, idx2, v2, acc):  # pragma: no cover
        for i in range(idx1.size):
            base = idx1[i]
            vi = v1[i]
            for k in range(idx2.size):
                acc[base + idx2[k]] += vi * v2[k]

    @njit(cache=True)
    def _xi1_accumulate_jit(c1, v1, c2, v2, c3, v3, idx1, idx2n, idx3, t, acc):  # pragma: no cover
        dim = c1.shape[1]
        n1, n2, n3 = v1.size, v2.size, v3.size
        for i in range(n1):
            for k in range(n2):
                vik = v1[i] * np.conj(v2[k])
                base = idx1[i] + idx2n[k]
                for m in range(n3):
                    omega = 0.0
                    for q in range(dim):
                        omega += (c1[i, q] - c2[k, q]) * (c3[m, q] - c2[k, q])
                    omega *= 2.0
                    if abs(omega) < OMEGA_TOL:
                        kern = t + 0.0j
                    else:
                        kern = (1.0 - np.exp(-1j * (t * omega))) / (1j * omega)
                    acc[base + idx3[m]] += vik * v3[m] * kern

    @njit(cache=True)
    def _xi1_phase_stats_jit(c1, c2, c3, t):  # pragma: no cover
        dim = c1.shape[1]
        max_tw = 0.0
        min_re = np.inf
        for i in range(c1.shape[0]):
            for k in range(c2.shape[0]):
                for m in range(c3.shape[0]):
                    omega = 0.0
                    for q in range(dim):
                        omega += (c1[i, q] - c2[k, q]) * (c3[m, q] - c2[k, q])
                    omega *= 2.0
                    tw = t * omega
                    if abs(tw) > max_tw:
                        max_tw = abs(tw)
                    if abs(tw) < OMEGA_TOL:
                        re = 1.0
                    else:
                        re = np.sin(tw) / tw
                    if re < min_re:
                        min_re = re
        return max_tw, min_re

    def accumulate_products_numba(idx1, v1, idx2, v2, acc) -> None:
        if idx1.size and idx2.size:
            _accumulate_products_jit(idx1, v1, idx2, v2, acc)

    def xi1_accumulate_numba(c1, v1, c2, v2, c3, v3, idx1, idx2n, idx3, t, acc) -> None:
        if v1.size and v2.size and v3.size:
            _xi1_accumulate_jit(
                c1.astype(np.float64), v1, c2.astype(np.float64), v2,
                c3.astype(np.float64), v3, idx1, idx2n, idx3, t, acc,
            )

    def xi1_phase_stats_numba(c1, c2, c3, t):
        return _xi1_phase_stats_jit(
            c1.astype(np.float64), c2.astype(np.float64), c3.astype(np.float64), t
        )


if USE_NUMBA:
    accumulate_products = accumulate_products_numba
    xi1_accumulate = xi1_accumulate_numba
    xi1_phase_stats = xi1_phase_stats_numba
else:
    accumulate_products = accumulate_products_numpy
    xi1_accumulate = xi1_accumulate_numpy
    xi1_phase_stats = xi1_phase_stats_numpy
