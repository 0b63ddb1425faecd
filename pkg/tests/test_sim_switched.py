import math
from dataclasses import replace

import numpy as np
import pytest

from vsi_ssa.errors import InfeasibleDutyError, UsageError
from vsi_ssa.sim_switched import (
    SwitchState,
    bridge_derivative,
    carrier,
    check_duty_range,
    dominant_frequency,
    duty_waveforms,
    grid_voltages,
    simulate_switched,
    switch_states,
    u_nN_of_state,
)
from vsi_ssa.frames import park_forward
from vsi_ssa.steady_state import operating_point
from vsi_ssa.trace import SimTrace, steady_state_of_trace, switching_average

PERIOD = 20e-3


def test_duty_waveforms_at_zero(op):
    d_a, d_b, d_c = duty_waveforms(op, 0.0)
    assert d_a == pytest.approx(0.5 + op.d_d, abs=1e-15)
    assert d_a == pytest.approx(0.8103, abs=5e-4)
    c, s = math.cos(-2 * math.pi / 3), math.sin(-2 * math.pi / 3)
    assert d_b == pytest.approx(0.5 + op.d_d * c - op.d_q * s, abs=1e-15)
    assert d_b == pytest.approx(0.3477, abs=5e-4)
    assert d_c == pytest.approx(0.3420, abs=5e-4)


def test_duty_waveforms_pure_zero_sequence(op):
    flat = replace(op, d_d=0.0, d_q=0.0)
    theta = np.linspace(0, 2 * np.pi, 17)
    for d in duty_waveforms(flat, theta):
        assert np.allclose(d, 0.5, atol=1e-15)


def test_duty_feasibility_over_period(op):
    theta = np.linspace(0, 2 * np.pi, 4001)
    waves = np.vstack(duty_waveforms(op, theta))
    assert waves.min() > 0 and waves.max() < 1
    assert np.allclose(waves.sum(axis=0), 1.5, atol=1e-12)


def test_duty_infeasible_without_zero_sequence(op):
    bare = replace(op, d_0=0.0)
    with pytest.raises(InfeasibleDutyError):
        duty_waveforms(bare, np.linspace(0, 2 * np.pi, 100))
    with pytest.raises(InfeasibleDutyError):
        check_duty_range(bare)
    check_duty_range(op)


def test_carrier():
    f = 1e5
    assert carrier(0.0, f) == 0.0
    assert carrier(0.5 / f, f) == pytest.approx(0.5)
    assert carrier(1 / f, f) == pytest.approx(0.0, abs=1e-9)
    t = np.linspace(0, 3 / f, 301)
    c = carrier(t, f)
    assert c.min() >= 0 and c.max() < 1


def test_switch_states():
    assert switch_states((0.8, 0.3, 0.3), 0.5) == SwitchState(True, False, False)
    assert switch_states((0.1, 0.2, 0.3), 0.0) == SwitchState(True, True, True)
    assert switch_states((0.0, 0.0, 0.0), 0.2) == SwitchState(False, False, False)
    assert SwitchState(True, True, False).closed == 2


def test_u_nn_levels():
    assert u_nN_of_state((0, 0, 0), 30) == 0
    assert u_nN_of_state((1, 0, 0), 30) == 10
    assert u_nN_of_state((1, 1, 0), 30) == 20
    assert u_nN_of_state((1, 1, 1), 30) == 30


def test_grid_voltages(params):
    a, b, c = grid_voltages(params, 0.0)
    assert (float(a), float(b), float(c)) == pytest.approx((8.6, -4.3, -4.3), abs=1e-12)
    t = np.linspace(0, PERIOD, 37)
    abc = grid_voltages(params, t)
    assert np.allclose(sum(abc), 0, atol=1e-12)
    d, q, z = park_forward(*abc, params.omega_s * t)
    assert np.allclose(d, 8.6) and np.allclose(q, 0, atol=1e-12) and np.allclose(z, 0, atol=1e-12)


def test_bridge_derivative(params):
    L = params.inductance
    expected = (-8.6 / L, 4.3 / L, 4.3 / L)
    for sw in (SwitchState(False, False, False), SwitchState(True, True, True)):
        assert bridge_derivative(params, (0, 0, 0), sw, 0.0) == pytest.approx(expected, rel=1e-12)
    rng = np.random.default_rng(1)
    for _ in range(20):
        state = rng.normal(size=3)
        state -= state.mean()
        sw = tuple(rng.integers(0, 2, size=3).astype(bool))
        assert abs(sum(bridge_derivative(params, state, sw, rng.uniform(0, PERIOD)))) < 1e-6


def test_current_closure(switched_trace):
    total = switched_trace["i_a"] + switched_trace["i_b"] + switched_trace["i_c"]
    assert np.max(np.abs(total)) < 1e-9


def test_u_nn_quantized(switched_trace):
    assert set(np.unique(switched_trace["u_nn"]).tolist()) <= {0.0, 10.0, 20.0, 30.0}
    k = switched_trace["s_a"].astype(int) + switched_trace["s_b"] + switched_trace["s_c"]
    assert np.array_equal(switched_trace["u_nn"], k * 10.0)


def test_leg_voltage_peak(switched_trace):
    u_an = switched_trace["u_an"]
    assert u_an.max() == 20.0
    assert u_an.min() == -20.0
    assert set(np.unique(u_an).tolist()) <= {-20.0, -10.0, 0.0, 10.0, 20.0}


def test_trailing_averages(switched_trace, avg_trace):
    sw = steady_state_of_trace(switched_trace, PERIOD)
    av = steady_state_of_trace(avg_trace, PERIOD)
    assert sw["i_in"].mean == pytest.approx(2.0, rel=0.05)
    assert abs(sw["i_oq"].mean) < 0.1
    assert sw["i_od"].mean == pytest.approx(av["i_od"].mean, rel=0.05)
    assert sw["u_nn"].mean == pytest.approx(15.0, rel=0.02)


def test_switching_average_u_nn(switched_trace):
    avg = switching_average(switched_trace)
    tail = avg["u_nn"][-int(PERIOD / switched_trace.dt):]
    assert tail.min() > 0
    assert tail.mean() == pytest.approx(15.0, rel=0.02)
    assert avg.warmup[:19].all() and not avg.warmup[19:].any()


def test_switching_average_fine_step(params, op):
    tr = simulate_switched(params, op, duration=20e-3, dt=0.1e-6)
    u = switching_average(tr)["u_nn"][100:]
    assert np.max(np.abs(u / 15.0 - 1)) < 0.02


def test_d0_invariance(params):
    means = []
    for d0 in (0.45, 0.5, 0.55):
        tr = simulate_switched(params, operating_point(params, d0), duration=60e-3)
        means.append(steady_state_of_trace(tr, PERIOD))
    for name in ("i_od", "i_in"):
        vals = [m[name].mean for m in means]
        assert max(vals) - min(vals) < 0.01 * abs(vals[1]), name
    oq = [m["i_oq"].mean for m in means]
    assert max(oq) - min(oq) < 0.01 * means[1]["i_od"].mean
    assert [m["u_nn"].mean for m in means] == pytest.approx([13.5, 15.0, 16.5], rel=0.02)


def test_fundamental_frequency(switched_trace, params):
    tail = switched_trace.tail(2 * PERIOD)["i_a"]
    assert dominant_frequency(tail, switched_trace.dt) == pytest.approx(params.f_grid, abs=1e-6)


def test_switching_average_errors(switched_trace):
    with pytest.raises(UsageError):
        switching_average(switched_trace, 0.75e-6)
    with pytest.raises(UsageError):
        switching_average(switched_trace, 0.5e-6)
    bare = SimTrace(dt=1.0, channels={"x": np.ones(5)}, columns={"x": "x"})
    with pytest.raises(UsageError):
        switching_average(bare)


def test_switching_average_constant_channel():
    tr = SimTrace(dt=1.0, channels={"x": np.full(50, 3.25)}, columns={"x": "x"})
    assert np.array_equal(switching_average(tr, 10.0)["x"], np.full(50, 3.25))


def test_full_window_suppresses_ripple():
    t = np.arange(2000)
    x = 5.0 + np.where(t % 20 < 10, 1.0, -1.0)
    tr = SimTrace(dt=1.0, channels={"x": x}, columns={"x": "x"})
    avg = switching_average(tr, 2000.0)["x"]
    assert abs(avg[-1] - 5.0) < 0.05


def test_step_size_guard(params, op):
    with pytest.raises(UsageError):
        simulate_switched(params, op, duration=1e-3, dt=1e-6)
    with pytest.raises(UsageError):
        simulate_switched(params, op, duration=1e-3, dt=0.0)


def test_infeasible_simulation_rejected(params, op):
    with pytest.raises(InfeasibleDutyError):
        simulate_switched(params, replace(op, d_0=0.0), duration=1e-3)


def test_csv_export(tmp_path, params, op):
    tr = simulate_switched(params, op, duration=20e-6)
    path = tmp_path / "sw.csv"
    tr.to_csv(path, averaged=switching_average(tr))
    header = path.read_text().splitlines()[0].split(",")
    base = "t_s,i_a_a,i_b_a,i_c_a,i_in_a,u_nn_v,u_an_v,d_a,d_b,d_c,i_od_a,i_oq_a".split(",")
    assert header[:12] == base
    assert header[12:-1] == [f"{c}_avg" for c in base[1:]]
    assert header[-1] == "warmup"
