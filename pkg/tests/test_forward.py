import numpy as np
import pytest

from born_series_lab.scattering.excs import ParameterError, ResolventError, SolverConvergenceError
from born_series_lab.scattering.forward import (
    far_field,
    generate_dataset,
    incident_wave,
    solve_lippmann_schwinger,
)
from born_series_lab.scattering.grid import make_grid, physical_axes, to_freq
from born_series_lab.scattering.resolvent import kernel_symbol
from born_series_lab.scattering.scene import rasterize
from born_series_lab.scattering.schema import Field, OmitReason, PotentialSpec
from tests.conftest import bump, gaussian

THETA_INC = (0.0, 1.0)


def scaled_example2(amplitude):
    return PotentialSpec.scaled(PotentialSpec.example2(), amplitude)


def test_zero_potential_scatters_nothing(grid32):
    u_s = solve_lippmann_schwinger(Field.zeros(grid32), 2.0, THETA_INC)
    assert not np.any(u_s.data)


def test_solution_residual(grid32):
    q = rasterize(scaled_example2(0.5), grid32)
    k = 3.0
    u_s = solve_lippmann_schwinger(q, k, THETA_INC, tol=1e-10)
    symbol = kernel_symbol(grid32, k)
    u_i = incident_wave(grid32, k, THETA_INC).data
    residual = u_s.data - symbol.convolve(q.data * (u_i + u_s.data))
    born = symbol.convolve(q.data * u_i)
    assert np.linalg.norm(residual) <= 1e-10 * np.linalg.norm(born)


def test_complex_potential(grid32):
    q = rasterize(scaled_example2(0.3), grid32)
    q = q.with_data(q.data * (1 + 0.5j))
    u_s = solve_lippmann_schwinger(q, 2.0, THETA_INC, tol=1e-10)
    symbol = kernel_symbol(grid32, 2.0)
    u_i = incident_wave(grid32, 2.0, THETA_INC).data
    residual = u_s.data - symbol.convolve(q.data * (u_i + u_s.data))
    assert np.linalg.norm(residual) <= 1e-9 * np.linalg.norm(u_s.data)


def test_neumann_agrees_with_gmres(grid32):
    q = rasterize(scaled_example2(0.1), grid32)
    gmres = solve_lippmann_schwinger(q, 2.0, THETA_INC, tol=1e-11)
    neumann = solve_lippmann_schwinger(q, 2.0, THETA_INC, tol=1e-11, method="neumann")
    assert np.linalg.norm(gmres.data - neumann.data) <= 1e-9 * np.linalg.norm(gmres.data)


def test_solver_reports_failure(grid32):
    q = rasterize(scaled_example2(1.0), grid32)
    with pytest.raises(SolverConvergenceError) as exc_info:
        solve_lippmann_schwinger(q, 4.0, THETA_INC, tol=1e-12, method="neumann", max_iterations=2)
    assert exc_info.value.residual > 1e-12
    assert exc_info.value.iterations == 2


def test_solver_rejects_bad_arguments(grid16, grid32):
    q = rasterize(scaled_example2(0.1), grid32)
    with pytest.raises(ParameterError):
        solve_lippmann_schwinger(q, 2.0, THETA_INC, tol=0.0)
    with pytest.raises(ResolventError):
        solve_lippmann_schwinger(q, 2.0, THETA_INC, symbol=kernel_symbol(grid32, 2.5))
    with pytest.raises(ResolventError):
        solve_lippmann_schwinger(q, 2.0, THETA_INC, symbol=kernel_symbol(grid16, 2.0))


def born_defect(amplitude, spec, k):
    q = rasterize(scaled_example2(amplitude), spec)
    symbol = kernel_symbol(spec, k)
    u_s = solve_lippmann_schwinger(q, k, THETA_INC, tol=1e-12, symbol=symbol)
    born = symbol.convolve(q.data * incident_wave(spec, k, THETA_INC).data)
    return np.linalg.norm(u_s.data - born) / np.linalg.norm(born)


def test_born_term_dominates_weak_scattering():
    spec = make_grid(64, 2.1)
    ratio = born_defect(0.2, spec, 2.0) / born_defect(0.1, spec, 2.0)
    assert ratio == pytest.approx(2.0, abs=0.5)


def test_far_field_of_gaussian():
    spec = make_grid(64, 2.1)
    width = 0.3
    q = gaussian(spec, width)
    k, theta = 2.0, (1.0, 0.0)
    value = far_field(q, Field.zeros(spec), k, theta, THETA_INC)
    expected = 2 * np.pi * width**2 * np.exp(-8.0 * width**2 / 2)
    assert value == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("theta", [(1.0, 0.0), (0.0, -1.0), (0.6, 0.8), (-0.8, -0.6)])
def test_far_field_of_square(theta):
    spec = make_grid(64, 2.1)
    # edges halfway between nodes, so the node sum is a midpoint rule
    a = 7.5 * spec.spacing
    x1, x2 = physical_axes(spec)
    square = Field(spec=spec, data=((np.abs(x1) < a) & (np.abs(x2) < a)).astype(float))
    k = 2.0
    p = k * (np.asarray(theta) - np.asarray(THETA_INC))
    expected = np.prod(2 * a * np.sinc(p * a / np.pi))
    value = far_field(square, Field.zeros(spec), k, theta, THETA_INC)
    assert abs(value - expected) <= 1e-2 * abs(expected)


def test_far_field_born_term(grid32, rng):
    q = rasterize(scaled_example2(0.5), grid32)
    zero = Field.zeros(grid32)
    k = 1.7
    theta = (0.6, -0.8)
    forward = far_field(q, zero, k, theta, THETA_INC)
    backward = far_field(q, zero, k, THETA_INC, theta)
    assert backward == pytest.approx(forward.conjugate(), rel=1e-12)
    other = Field(spec=grid32, data=rng.standard_normal((32, 32)))
    combined = far_field(q.with_data(2 * q.data - 3j * other.data), zero, k, theta, THETA_INC)
    separate = 2 * forward - 3j * far_field(other, zero, k, theta, THETA_INC)
    assert combined == pytest.approx(separate, rel=1e-12)


def test_far_field_of_zero_potential(grid32, rng):
    u_s = Field(spec=grid32, data=rng.standard_normal((32, 32)))
    assert far_field(Field.zeros(grid32), u_s, 2.0, (1.0, 0.0), THETA_INC) == 0


def test_generate_dataset_structure(weak_example2_data):
    d = weak_example2_data
    n = d.inverse_spec.n
    assert len(d.records) + len(d.omitted) == n * n
    assert [r.idx for r in d.records] == sorted(r.idx for r in d.records)
    reasons = {(o.i, o.j): o.reason for o in d.omitted}
    assert reasons[(0, 0)] == OmitReason.ZERO
    assert all(reasons[(i, 0)] == OmitReason.DEGENERATE for i in range(1, n))
    assert OmitReason.SOLVER not in reasons.values()
    assert all(r.k <= d.k_max for r in d.records)
    assert not d.inverse_crime
    assert d.potential_id == "scaled(example2,0.1)"


def test_dataset_record_matches_direct_solve(weak_example2_data):
    d = weak_example2_data
    record = d.records[len(d.records) // 3]
    fine = make_grid(d.inverse_spec.n * d.fine_factor, d.inverse_spec.half_width)
    q = rasterize(scaled_example2(0.1), fine)
    theta_inc = (record.sign * d.theta0[0], record.sign * d.theta0[1])
    u_s = solve_lippmann_schwinger(q, record.k, theta_inc, tol=d.tol)
    expected = far_field(q, u_s, record.k, record.theta, theta_inc)
    assert record.u_inf == pytest.approx(expected, rel=1e-6)


def test_dataset_of_zero_potential():
    d = generate_dataset(scaled_example2(0.0), make_grid(16, 2.1))
    assert d.records
    assert all(r.u_inf == 0 for r in d.records)


def test_weak_data_is_born_data():
    spec = make_grid(16, 2.1)
    potential = scaled_example2(1e-3)
    d = generate_dataset(potential, spec, fine_factor=1)
    assert d.inverse_crime
    q_hat = to_freq(rasterize(potential, spec)).data
    measured = np.array([r.u_inf for r in d.records])
    born = np.array([q_hat[r.idx] for r in d.records])
    assert np.linalg.norm(measured - born) <= 1e-2 * np.linalg.norm(born)


def test_generate_dataset_workers_agree():
    spec = make_grid(16, 2.1)
    serial = generate_dataset(scaled_example2(0.5), spec)
    threaded = generate_dataset(scaled_example2(0.5), spec, workers=4)
    assert [r.idx for r in serial.records] == [r.idx for r in threaded.records]
    expected = np.array([r.u_inf for r in serial.records])
    actual = np.array([r.u_inf for r in threaded.records])
    assert np.linalg.norm(actual - expected) <= 1e-12 * np.linalg.norm(expected)
    assert serial.omitted == threaded.omitted


def test_generate_dataset_rejects_bad_fine_factor(grid16):
    with pytest.raises(ParameterError):
        generate_dataset(scaled_example2(0.1), grid16, fine_factor=0)


def test_fine_grid_data_is_resolution_independent():
    spec = make_grid(16, 2.1)
    # smooth and compactly supported, so both fine grids resolve it
    potential = PotentialSpec.from_raster(bump(make_grid(64, 2.1), radius=1.2))
    coarse = generate_dataset(potential, spec, fine_factor=2, k_max=8.0)
    fine = generate_dataset(potential, spec, fine_factor=4, k_max=8.0)
    a = {r.idx: r.u_inf for r in coarse.records}
    b = {r.idx: r.u_inf for r in fine.records}
    common = a.keys() & b.keys()
    assert len(common) > 50
    difference = np.linalg.norm([a[idx] - b[idx] for idx in sorted(common)])
    assert difference <= 1e-3 * np.linalg.norm([b[idx] for idx in sorted(common)])
