"""Wave solver and report-structure unit tests."""

import dataclasses

import numpy as np
import pytest

from hankelheat import (
    CheckReport,
    Instability,
    Order,
    gaussian_cutoff_bump,
    make_wave_state,
    wave_energy,
    wave_run,
    wave_step,
)


def test_state_shapes_and_invariants():
    order = Order(2.0)
    state = make_wave_state(order, gaussian_cutoff_bump(), n_x=48,
                            u_lo=-2.0, u_hi=2.0)
    n_x, n_u = state.plane.shape()
    assert state.w_now.shape == (n_x, n_u)
    assert state.w_prev.shape == (n_x, n_u)
    assert state.dt > 0.0
    assert state.time == 0.0


def test_zero_data_stays_zero():
    order = Order(2.0)
    state = make_wave_state(order, lambda x, u: np.zeros_like(x + u),
                            n_x=40, u_lo=-2.0, u_hi=2.0)
    for _ in range(50):
        state = wave_step(state)
    assert np.all(state.w_now == 0.0)


def test_energy_is_conserved():
    order = Order(2.0)
    state = make_wave_state(order, gaussian_cutoff_bump(sigma=0.4), n_x=80,
                            u_lo=-3.0, u_hi=2.0)
    state = wave_step(state)
    e0 = wave_energy(state)
    for _ in range(200):
        state = wave_step(state)
    e1 = wave_energy(state)
    assert abs(e1 - e0) / abs(e0) < 1e-10


def test_wave_run_advances_time():
    order = Order(2.0)
    state = make_wave_state(order, gaussian_cutoff_bump(), n_x=40,
                            u_lo=-2.0, u_hi=2.0)
    out = wave_run(state, 0.25)
    assert out.time >= 0.25 - out.dt * 0.5


def test_unstable_step_raises():
    order = Order(2.0)
    state = make_wave_state(order, gaussian_cutoff_bump(), n_x=60,
                            u_lo=-2.0, u_hi=2.0)
    # force a time step far beyond the stability limit
    bad = dataclasses.replace(state, dt=50.0 * state.dt)
    with pytest.raises(Instability):
        for _ in range(400):
            bad = wave_step(bad)


def test_check_report_requires_positive_tolerance():
    with pytest.raises(Exception):
        CheckReport(name="x", measured=0.0, tolerance=0.0, passed=True,
                    note="")
    rep = CheckReport(name="x", measured=0.5, tolerance=1.0, passed=True,
                      note="n")
    assert rep.passed
