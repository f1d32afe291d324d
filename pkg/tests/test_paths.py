import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from truncvar import ParameterError, Path, PathFormatError, SimulationParams, path_from_csv, path_to_csv, simulate_bm
from truncvar.paths import grid_size, replicate_generator


def test_single_increment():
    p = simulate_bm(SimulationParams(0.0, 1.0, 1.0, 7))
    assert len(p) == 2
    assert p.values[0] == 0.0
    assert np.array_equal(p.times, [0.0, 1.0])


def test_determinism():
    params = SimulationParams(0.5, 1.0, 1e-3, 42)
    a, b = simulate_bm(params), simulate_bm(params)
    assert a == b
    assert path_to_csv(a) == path_to_csv(b)
    assert simulate_bm(SimulationParams(0.5, 1.0, 1e-3, 43)) != a


def test_grid_covers_horizon():
    p = simulate_bm(SimulationParams(0.0, 1.0, 0.3, 1))
    assert len(p) == 5  # ceil(1/0.3) = 4 steps
    assert p.times[-1] >= 1.0
    assert grid_size(1.0, 1e-3) == 1000
    assert grid_size(1.0, 0.1) == 10


def test_increments_are_gaussian():
    mu, dt = 0.7, 1e-2
    p = simulate_bm(SimulationParams(mu, 1000.0, dt, 3))
    inc = np.diff(p.values)
    assert inc.size == 100_000
    z = (inc - mu * dt) / np.sqrt(dt)
    assert stats.kstest(z, "norm").pvalue > 1e-3
    assert abs(z.mean()) < 4 / np.sqrt(z.size)
    assert abs(z.var() - 1) < 0.02


@pytest.mark.parametrize(
    "field,kwargs",
    [
        ("horizon_T", dict(drift_mu=0.0, horizon_T=0.0, step_dt=0.1, seed=1)),
        ("step_dt", dict(drift_mu=0.0, horizon_T=1.0, step_dt=-1.0, seed=1)),
        ("step_dt", dict(drift_mu=0.0, horizon_T=1.0, step_dt=2.0, seed=1)),
        ("drift_mu", dict(drift_mu=float("nan"), horizon_T=1.0, step_dt=0.1, seed=1)),
        ("seed", dict(drift_mu=0.0, horizon_T=1.0, step_dt=0.1, seed=-1)),
        ("seed", dict(drift_mu=0.0, horizon_T=1.0, step_dt=0.1, seed=2**64)),
    ],
)
def test_parameter_errors_name_field(field, kwargs):
    with pytest.raises(ParameterError, match=field):
        SimulationParams(**kwargs)


def test_csv_parse():
    p = path_from_csv("t,value\n0,0\n1,2.5")
    assert p == Path([0.0, 1.0], [0.0, 2.5])


@pytest.mark.parametrize(
    "text,line",
    [
        ("t,value\n0,0\n0,1", 3),
        ("t,value\n0,0\n1,nan", 3),
        ("t,value\n0,x", 2),
        ("t,value\n0,0\n1,2,3", 3),
        ("time,value\n0,0", 1),
        ("t,value\n0,0\n2,1\n1,0", 4),
    ],
)
def test_csv_errors_report_line(text, line):
    with pytest.raises(PathFormatError) as info:
        path_from_csv(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize(
    "values",
    [[1.0, 1.0, 1.0, 1.0], [0.0, 0.1, 0.2, 0.7], [0.0, 1.0, -0.5, 2.0, 1e-300, -3.3]],
    ids=["constant", "monotone", "zigzag"],
)
def test_csv_round_trip(values):
    p = Path.from_values(values, dt=0.1)
    assert path_from_csv(path_to_csv(p)) == p


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30), st.floats(1e-6, 10.0))
def test_csv_round_trip_property(values, dt):
    p = Path.from_values(values, dt)
    assert path_from_csv(path_to_csv(p)) == p


def test_path_validation():
    with pytest.raises(ValueError):
        Path([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        Path([0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        Path([], [])
    with pytest.raises(ValueError):
        Path([0.0], [np.inf])


def test_path_is_immutable():
    src = np.array([0.0, 1.0])
    p = Path.from_values(src)
    src[0] = 5.0
    assert p.values[0] == 0.0
    with pytest.raises(ValueError):
        p.values[0] = 1.0


def test_replicate_streams_differ():
    a = replicate_generator(1, 0).standard_normal(4)
    b = replicate_generator(1, 1).standard_normal(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, replicate_generator(1, 0).standard_normal(4))
