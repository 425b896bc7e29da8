"""Smoke tests for the masim python module."""

import math

import numpy as np
import pytest

masim = pytest.importorskip("masim")


def default_config(region_len=12.0):
    return masim.to_array_config(masim.SystemProfile(), region_len)


def test_version_and_tags():
    assert masim.__version__
    assert masim.scheme_tags() == ["SIC-FPA", "SIC-MA", "U-SIC-FPA", "U-SIC-MA"]


def test_wave_vector_axis_cases():
    assert np.allclose(masim.wave_vector(0.0, 1.3), [0, 0, 1])
    v = masim.wave_vector(math.pi / 3, math.pi / 4)
    assert np.isclose(np.linalg.norm(v), 1.0)


def test_steering_vector_norms():
    cfg = default_config()
    layout = masim.initial_layout(cfg)
    a = masim.tx_response(0.9, 0.3, layout, cfg)
    assert a.shape == (cfg.m_t,)
    assert np.isclose(np.linalg.norm(a) ** 2, cfg.u)
    e = masim.elem_response(0.9, 0.3, cfg)
    assert np.isclose(np.linalg.norm(e), 1.0)
    assert np.allclose(np.abs(masim.sub_response(0.9, 0.3, layout, cfg)), 1.0)


def test_layout_and_partition():
    cfg = default_config()
    layout = masim.initial_layout(cfg)
    assert len(layout.positions) == cfg.u
    assert masim.validate_spacing(layout, cfg.d_min)
    regions = masim.partition_regions(cfg)
    assert len(regions) == cfg.u
    for x_lo, z_lo, x_hi, z_hi in regions:
        assert x_hi >= x_lo and z_hi >= z_lo


def test_channel_dimensions_and_determinism():
    cfg = default_config()
    layout = masim.initial_layout(cfg)
    profile = masim.ChannelProfile()
    paths = masim.draw_paths(7, 2, profile)
    assert len(paths) == 2
    assert paths[0].gain.shape == (profile.n_cl, profile.n_ray)
    h1 = masim.assemble_channel(paths[0], layout, cfg)
    h2 = masim.assemble_channel(masim.draw_paths(7, 2, profile)[0], layout, cfg)
    assert h1.shape == (cfg.n_r, cfg.m_t)
    assert np.array_equal(h1, h2)


def test_bd_rates_null_interference():
    system = masim.SystemProfile()
    cfg = default_config()
    layout = masim.initial_layout(cfg)
    paths = masim.draw_paths(3, system.k_users, masim.ChannelProfile())
    channels = masim.build_channel_set(paths, layout, cfg, 1.0)
    analog = masim.initial_analog(paths, layout, cfg)
    rates = masim.bd_rates(channels, analog, system.n_s)
    assert rates["max_rel_leakage"] <= 1e-9
    assert rates["sum"] > 0
    assert np.isclose(sum(rates["per_user"]), rates["sum"])


def test_sic_sweep_improves_the_objective():
    cfg = default_config()
    layout = masim.initial_layout(cfg)
    paths = masim.draw_paths(11, 2, masim.ChannelProfile())
    channels = masim.build_channel_set(paths, layout, cfg, 1.0)
    analog = masim.initial_analog(paths, layout, cfg)
    start = masim.sum_rate_simplified(channels, analog)
    updated, trace, nonmono = masim.sic_sweep(channels, analog, constrained=False)
    assert trace[0] == pytest.approx(start)
    assert trace[-1] >= start - 1e-9
    assert nonmono == 0
    assert masim.sum_rate_simplified(channels, updated) == pytest.approx(trace[-1])


def test_run_trial_scheme_ordering():
    fpa = masim.run_trial("SIC-FPA", seed=5)
    ma = masim.run_trial("SIC-MA", seed=5)
    assert fpa["rate_bd"] > 0
    assert ma["rate_simplified"] >= fpa["rate_simplified"] - 1e-9
    assert len(ma["outer_trace"]) == ma["outer_iterations"]
    again = masim.run_trial("SIC-MA", seed=5)
    assert again["rate_bd"] == ma["rate_bd"]
    assert again["positions"] == ma["positions"]
