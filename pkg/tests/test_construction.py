"""Tests for data construction, regime selection, and condition checking."""

import io
import math

import numpy as np
import pytest

from nls_inflation_lab.construction import (
    InflationParams,
    build_background,
    build_phi_n,
    check_conditions,
    f_of_A,
    read_params,
    select_parameters,
    threshold_log2N,
    write_params,
)
from nls_inflation_lab.spectra import SparseSpectrum, fl_norm, sobolev_norm

LG10 = math.log2(10.0)


# ---------------------------------------------------------------------------
# phi_n and backgrounds


def test_phi_n_small_case_exact_support_and_values():
    phi = build_phi_n(1, 8, 2, 1.5)
    assert sorted(tuple(c) for c in phi.coords) == [(7,), (8,), (15,), (16,)]
    assert np.allclose(phi.values, 1.5)


def test_phi_n_fl1_is_twice_R_A_to_d():
    for d, N, A, R in ((1, 16, 4, 1.0), (2, 16, 3, 0.7), (3, 8, 2, 2.5)):
        phi = build_phi_n(d, N, A, R)
        assert len(phi) == 2 * A**d
        assert fl_norm(phi, 1) == pytest.approx(2 * R * A**d, rel=1e-14)


def test_phi_n_cubes_disjoint_even_at_A_equal_N():
    phi = build_phi_n(1, 4, 4, 1.0)
    assert len(phi) == 8  # no merged entries


def test_phi_n_validation_errors():
    with pytest.raises(ValueError, match="overlap"):
        build_phi_n(1, 4, 5, 1.0)
    with pytest.raises(ValueError):
        build_phi_n(0, 8, 2, 1.0)
    with pytest.raises(ValueError):
        build_phi_n(1, 8, 2, 0.0)
    with pytest.raises(ValueError):
        build_phi_n(1, 8, 0, 1.0)


def test_background_zero_and_gaussian():
    zero = build_background(2, "zero")
    assert len(zero) == 0 and zero.dim == 2
    bg = build_background(1, "gaussian(0.5,2)")
    assert bg.support_radius() == 8  # radius 4w
    lookup = {tuple(c): v for c, v in zip(bg.coords, bg.values)}
    assert lookup[(0,)] == pytest.approx(0.5)
    assert lookup[(3,)] == pytest.approx(0.5 * math.exp(-9 / 4))
    with pytest.raises(ValueError):
        build_background(1, "gaussian(1,0.5)")
    with pytest.raises(ValueError):
        build_background(1, "blob(1,2)")


def test_f_of_A_branches():
    assert f_of_A(8, -1.0, 1) == 1.0
    assert f_of_A(8, -0.5, 1) == pytest.approx(math.sqrt(math.log(8)))
    assert f_of_A(8, -0.3, 1) == pytest.approx(8 ** (0.5 - 0.3))
    assert f_of_A(8, -1.0, 2) == pytest.approx(math.sqrt(math.log(8)))
    assert f_of_A(8, -0.5, 2) == pytest.approx(8 ** 0.5)
    with pytest.raises(ValueError):
        f_of_A(1, -1.0, 1)


# ---------------------------------------------------------------------------
# regime selection


def test_case1_exact_dyadic_example():
    params = select_parameters(2, -1.0, 1, 1 << 20)
    assert params.regime == 1
    assert params.delta == pytest.approx(0.1)
    assert params.A == 1 << 18          # floor-even of N^{(1-delta)/d}
    assert params.R == pytest.approx(16.0)      # N^{2 delta}
    assert params.T == pytest.approx(2.0**-46)  # N^{-2-3 delta}


def test_case1_delta_shrinks_near_the_boundary():
    params = select_parameters(2, -0.6, 1, 1 << 20)
    assert params.delta == pytest.approx((1.2 - 1.0) / 3.0 - 0.01)


def test_case2_rounding_keeps_data_norm_decreasing():
    values = []
    for N in (64, 128, 256):
        params = select_parameters(2, -0.5, 1, N)
        assert params.regime == 2
        assert params.R == 1.0
        assert params.T == pytest.approx(N**-2 * math.log(N) ** -0.125)
        values.append(sobolev_norm(params.phi_n(), -0.5))
    assert params.A == 231  # ceil(256 / (ln 256)^{1/16})
    assert values == sorted(values, reverse=True)
    assert values[0] == pytest.approx(1.21084, abs=2e-4)
    assert values[2] == pytest.approx(1.19641, abs=2e-4)


def test_case3_small_lattice_example():
    params = select_parameters(2, -0.5, 2, 8)
    assert params.regime == 3
    assert params.delta == pytest.approx(0.1)
    assert params.theta == pytest.approx(0.01)
    assert params.A == 7                               # ceil(8^{2/d - delta})
    assert params.R == pytest.approx(8.0**-0.41)       # N^{-1-s+d delta/2-theta}
    assert params.T == pytest.approx(8.0**-2.79)       # N^{-2+2s+d delta+theta}


def test_select_parameters_input_validation():
    with pytest.raises(ValueError):
        select_parameters(2, -0.5, 1, 100)  # not a power of two
    with pytest.raises(ValueError):
        select_parameters(2, -0.5, 1, 2)  # too small
    with pytest.raises(ValueError):
        select_parameters(2, -0.5, 1, 4)  # A would reach N
    with pytest.raises(ValueError):
        select_parameters(2, -0.3, 1, 64)  # d=1 needs s <= -1/2
    with pytest.raises(ValueError):
        select_parameters(2, 0.5, 1, 64)  # s must be negative
    with pytest.raises(ValueError):
        select_parameters(0, -1.0, 1, 64)  # n must be >= 1


def test_select_parameters_margins_gate():
    params = select_parameters(1, -1.0, 1, 1 << 34, margins=10.0)
    assert params.N == 1 << 34
    with pytest.raises(ValueError, match="vi-b"):
        select_parameters(1, -1.0, 1, 1 << 34, margins=12.0)


def test_inflation_params_validation():
    good = dict(n=2, d=1, s=-1.0, N=16, A=4, R=1.0, T=1e-4,
                delta=0.1, theta=0.0, regime=1)
    InflationParams(**good)
    for key, bad in (("n", 0), ("d", 4), ("s", 0.0), ("A", 16), ("R", 0.0),
                     ("T", -1.0), ("regime", 4)):
        with pytest.raises(ValueError):
            InflationParams(**{**good, key: bad})
    with pytest.raises(ValueError, match="regime 2"):
        InflationParams(**{**good, "regime": 2})
    with pytest.raises(ValueError, match="regime 3"):
        InflationParams(**{**good, "regime": 3})


def test_params_properties_and_io_roundtrip():
    params = select_parameters(2, -0.5, 2, 16)
    assert params.s_crit == 0.0
    assert params.f_value() == f_of_A(params.A, params.s, params.d)
    assert fl_norm(params.phi_n(), 1) == pytest.approx(2 * params.R * params.A**2)
    buf = io.StringIO()
    write_params(params, buf)
    buf.seek(0)
    again = read_params(buf)
    assert again == params
    with pytest.raises(ValueError):
        read_params(io.StringIO("nonsense\n"))


# ---------------------------------------------------------------------------
# conditions


def test_condition_ratios_exact_on_dyadic_case1():
    params = select_parameters(2, -1.0, 1, 1 << 20)
    report = check_conditions(params, None, margin=2.0)
    assert [e.name for e in report.entries] == [
        "i", "ii", "iii", "iv", "v", "vi-a", "vi-b", "vi-c",
    ]
    ratios = {e.name: e.ratio for e in report.entries}
    assert ratios["i"] == pytest.approx(64.0)
    assert ratios["ii"] == pytest.approx(4.0)
    assert ratios["iii"] == pytest.approx(2.0)
    assert ratios["v"] == pytest.approx(64.0)
    assert ratios["vi-b"] == pytest.approx(4.0)
    assert ratios["vi-a"] == math.inf  # zero background
    assert ratios["vi-c"] == math.inf
    assert report.all_pass  # margin 2, ties pass
    tighter = check_conditions(params, None, margin=10.0)
    assert not tighter.all_pass
    assert {e.name for e in tighter.failing()} == {"ii", "iii", "iv", "vi-b"}


def test_condition_iv_is_derived_from_ii():
    for n, s, d, N in ((2, -1.0, 1, 1 << 20), (2, -0.5, 1, 256), (2, -0.5, 2, 16)):
        report = check_conditions(select_parameters(n, s, d, N), None)
        entry_ii = report.entry("ii")
        entry_iv = report.entry("iv")
        assert entry_iv.derived and not entry_ii.derived
        assert entry_iv.ratio == pytest.approx(entry_ii.ratio, rel=1e-12)
        assert entry_iv.passed == entry_ii.passed


def test_condition_background_norms_enter_vi():
    params = select_parameters(2, -1.0, 1, 1 << 20)
    u0 = build_background(1, "gaussian(1,1)")
    report = check_conditions(params, u0, margin=10.0)
    vi_a = report.entry("vi-a")
    assert vi_a.lhs == pytest.approx(fl_norm(u0, 1))
    assert vi_a.ratio == pytest.approx(params.R * params.A / fl_norm(u0, 1))
    vi_c = report.entry("vi-c")
    assert vi_c.ratio == pytest.approx(params.R / fl_norm(u0, 2))


def test_report_entry_lookup_errors():
    report = check_conditions(select_parameters(2, -1.0, 1, 1 << 20))
    with pytest.raises(KeyError):
        report.entry("vii")


# ---------------------------------------------------------------------------
# threshold scan


@pytest.mark.parametrize(
    "n,s,d,expected,binding",
    [
        (1, -1.0, 1, LG10 / 0.1, "vi-b"),
        (2, -1.0, 1, (LG10 + 1.0) / 0.1, "iii"),
        (1, -2.0, 2, LG10 / 0.1, "ii"),
        (1, -0.5, 2, LG10 / 0.01, "i"),
        (1, -0.75, 3, LG10 / 0.01, "i"),
    ],
)
def test_threshold_values_power_law_regimes(n, s, d, expected, binding):
    k0, name = threshold_log2N(n, s, d, margin=10.0)
    assert k0 == pytest.approx(expected, rel=1e-9)
    assert name == binding


def test_threshold_critical_regime_is_astronomical():
    k0, name = threshold_log2N(1, -0.5, 1, margin=10.0)
    assert name == "i"
    assert k0 == pytest.approx(2.0 ** (32 * LG10) / math.log(2.0), rel=1e-9)


def test_threshold_unreachable_raises_with_binding_condition():
    with pytest.raises(ValueError, match="binding condition"):
        threshold_log2N(2, -0.5, 1, margin=10.0)


def test_threshold_consistent_with_condition_checker():
    # One step above the threshold the rounded parameters pass; one step
    # below, the checker names the binding trio.
    params = select_parameters(1, -1.0, 1, 1 << 34)
    assert check_conditions(params, None, margin=10.0).all_pass
    below = select_parameters(1, -1.0, 1, 1 << 33)
    failing = {e.name for e in check_conditions(below, None, margin=10.0).failing()}
    assert "vi-b" in failing
