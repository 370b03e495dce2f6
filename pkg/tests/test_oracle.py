"""Tests for the split-step reference solver and Picard iteration."""

import math

import numpy as np
import pytest

from nls_inflation_lab.duhamel import (
    QuadratureSpec,
    build_series,
    lwp_radius,
    partial_sum,
    wick_trilinear_product,
)
from nls_inflation_lab.construction import build_background
from nls_inflation_lab.oracle import (
    AliasingError,
    DenseGrid,
    DivergenceError,
    StepperConfig,
    evolve,
    from_dense,
    picard_solve,
    to_dense,
)
from nls_inflation_lab.spectra import SparseSpectrum, fl_norm, l2_norm, propagate


def gaussian() -> SparseSpectrum:
    return build_background(1, "gaussian(0.5,1)")


def mode_value(f: SparseSpectrum, coord: tuple) -> complex:
    for c, v in zip(f.coords, f.values):
        if tuple(int(x) for x in c) == coord:
            return complex(v)
    return 0.0 + 0.0j


# ---------------------------------------------------------------------------
# dense grid plumbing


def test_dense_roundtrip_is_lossless():
    f = SparseSpectrum.from_entries(
        2, {(0, 0): 1.0 + 1j, (-3, 2): 0.25, (3, -3): -1j}
    )
    grid = to_dense(f, 4)
    assert grid.n == 9
    back = from_dense(grid)
    assert back.dim == 2
    assert sorted(map(tuple, back.coords.tolist())) == sorted(
        map(tuple, f.coords.tolist())
    )
    assert fl_norm(back - f, 1) == 0.0


def test_to_dense_validates_cutoff():
    f = SparseSpectrum.single((5,), 1.0)
    with pytest.raises(ValueError, match="support radius"):
        to_dense(f, 4)
    with pytest.raises(ValueError):
        to_dense(f, 0)


def test_stepper_config_validation():
    with pytest.raises(ValueError):
        StepperConfig(dt=0.0)
    with pytest.raises(ValueError):
        StepperConfig(scheme="euler")


def test_dense_grid_l2_matches_sparse():
    f = gaussian()
    assert to_dense(f, 4).l2_norm() == pytest.approx(l2_norm(f), rel=1e-14)


# ---------------------------------------------------------------------------
# split-step solver


@pytest.mark.parametrize("wick,sign", [(False, +1), (True, -1)])
def test_plane_wave_exact_solution(wick, sign):
    """A single plane wave rotates with phase |k|^2 + |a|^2 (minus under Wick)."""
    a, k, t = 0.7, 2, 0.3
    u0 = SparseSpectrum.single((k,), a)
    out = evolve(u0, t, StepperConfig(wick=wick), K=4)
    expected = a * np.exp(1j * t * (k * k + sign * a * a))
    assert abs(mode_value(out, (k,)) - expected) <= 1e-10
    rest = sum(
        abs(v) ** 2 for c, v in zip(out.coords, out.values)
        if tuple(int(x) for x in c) != (k,)
    )
    assert math.sqrt(rest) <= 1e-10


def test_plane_wave_2d():
    a, t = 0.5, 0.2
    u0 = SparseSpectrum.single((1, -1), a)
    out = evolve(u0, t, StepperConfig(), K=2)
    expected = a * np.exp(1j * t * (2 + a * a))
    assert abs(mode_value(out, (1, -1)) - expected) <= 1e-10


def test_evolve_trivial_cases_and_validation():
    u0 = gaussian()
    assert fl_norm(evolve(u0, 0.0, StepperConfig(), K=8) - u0, 1) == 0.0
    zero = SparseSpectrum.zero(1)
    assert len(evolve(zero, 0.1, StepperConfig(), K=4)) == 0
    with pytest.raises(ValueError, match="cutoff"):
        evolve(u0, 0.1, StepperConfig(), K=7)  # needs K >= 2 * radius = 8
    with pytest.raises(ValueError):
        evolve(u0, -0.1, StepperConfig(), K=8)


def test_mass_is_conserved():
    u0 = gaussian()
    t = lwp_radius(u0) / 2
    out = evolve(u0, t, StepperConfig(), K=8)
    assert abs(l2_norm(out) - l2_norm(u0)) / l2_norm(u0) <= 1e-12


def test_strang_splitting_is_second_order():
    u0 = gaussian()
    t = lwp_radius(u0) / 2
    reference = evolve(u0, t, StepperConfig(dt=t / 4096), K=8)
    errs = [
        l2_norm(evolve(u0, t, StepperConfig(dt=t / steps), K=8) - reference)
        for steps in (128, 256)
    ]
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_aliasing_guard_trips_loudly():
    u0 = SparseSpectrum.from_entries(1, {(0,): 6.0, (1,): 6.0})
    with pytest.raises(AliasingError, match="increase K"):
        evolve(u0, 0.05, StepperConfig(), K=2)
    # the same run with enough headroom completes
    out = evolve(u0, 0.05, StepperConfig(), K=16)
    assert abs(l2_norm(out) - l2_norm(u0)) / l2_norm(u0) <= 1e-10


def test_wick_evolution_matches_wick_series():
    u0 = gaussian()
    t = lwp_radius(u0) / 4
    table = build_series(u0, 4, t, QuadratureSpec(128), wick_trilinear_product)
    reference = evolve(u0, t, StepperConfig(wick=True), K=8)
    rel = l2_norm(partial_sum(table, 4) - reference) / l2_norm(reference)
    assert rel <= 1e-8


# ---------------------------------------------------------------------------
# Picard iteration


def test_picard_zero_iterations_is_free_flow():
    u0 = gaussian()
    t = lwp_radius(u0) / 2
    assert fl_norm(picard_solve(u0, t, 0) - propagate(u0, t), 1) == 0.0


def test_picard_first_iterate_equals_first_partial_sum():
    u0 = gaussian()
    t = lwp_radius(u0) / 2
    quad = QuadratureSpec(64)
    iterate = picard_solve(u0, t, 1, quad)
    table = build_series(u0, 1, t, quad)
    assert fl_norm(iterate - partial_sum(table, 1), 1) == 0.0


def test_picard_agrees_with_series_to_increasing_order():
    """|P_k - partial sum_k| = O(t^{k+1}): halving t shrinks the gap ~16x at k=3."""
    u0 = gaussian()
    t = lwp_radius(u0) / 2
    quad = QuadratureSpec(64)
    gaps = []
    for tt in (t, t / 2):
        table = build_series(u0, 3, tt, quad)
        gaps.append(fl_norm(picard_solve(u0, tt, 3, quad) - partial_sum(table, 3), 1))
    assert gaps[0] / gaps[1] >= 14.0


def test_picard_cross_validates_split_step():
    u0 = gaussian()
    t = lwp_radius(u0) / 2
    iterate = picard_solve(u0, t, 5, QuadratureSpec(256))
    reference = evolve(u0, t, StepperConfig(), K=8)
    assert l2_norm(iterate - reference) / l2_norm(reference) <= 1e-6


def test_picard_validation_and_contraction_guard():
    u0 = gaussian()
    radius = lwp_radius(u0)
    with pytest.raises(ValueError, match="contraction"):
        picard_solve(u0, radius, 2)
    with pytest.raises(ValueError):
        picard_solve(u0, radius / 2, -1)
    # inside the radius the divergence guard stays quiet by contraction
    out = picard_solve(u0, radius * 0.99, 8, QuadratureSpec(32))
    assert fl_norm(out, 1) < 2.0 * fl_norm(u0, 1)
    assert issubclass(DivergenceError, RuntimeError)
