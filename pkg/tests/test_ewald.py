import math

import numpy as np
import pytest

from born_series_lab.scattering.ewald import (
    check_direction,
    default_eps_deg,
    default_k_max,
    ewald_map,
    plan_frequencies,
    reconstruct_frequency,
)
from born_series_lab.scattering.excs import DegenerateFrequencyError, IncidentDirectionError
from born_series_lab.scattering.grid import frequency_axes, make_grid
from born_series_lab.scattering.schema import OmitReason


@pytest.mark.parametrize("theta0", [(0.0, 1.0), (0.6, 0.8), (-1.0, 0.0)])
@pytest.mark.parametrize("xi", [(1.5, -2.0), (-0.3, 4.0), (3.0, 3.0), (-7.5, -0.9)])
def test_ewald_map_reconstructs(xi, theta0):
    if abs(xi[0] * theta0[0] + xi[1] * theta0[1]) < 0.1:
        pytest.skip("degenerate for this direction")
    point = ewald_map(xi, theta0, 0.1)
    assert point.k > 0
    assert math.hypot(*point.theta) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(reconstruct_frequency(point, theta0), xi, atol=1e-12)
    dot = xi[0] * theta0[0] + xi[1] * theta0[1]
    assert point.sign == (1 if dot < 0 else -1)
    assert point.k == pytest.approx((xi[0] ** 2 + xi[1] ** 2) / (2 * abs(dot)), rel=1e-15)


def test_ewald_map_backscatter():
    point = ewald_map((0.0, -2.0), (0.0, 1.0), 0.1)
    assert point.sign == 1
    assert point.k == pytest.approx(1.0)
    assert point.theta == pytest.approx((0.0, -1.0))


@pytest.mark.parametrize("xi", [(0.0, 0.0), (2.0, 0.0), (3.0, 0.05)])
def test_ewald_map_degenerate(xi):
    with pytest.raises(DegenerateFrequencyError):
        ewald_map(xi, (0.0, 1.0), 0.1)


def test_check_direction():
    assert check_direction((0, 1)) == (0.0, 1.0)
    with pytest.raises(IncidentDirectionError):
        check_direction((1.0, 1.0))


def test_defaults(grid32):
    assert default_k_max(grid32) == pytest.approx(math.pi * 32 / 4.2)
    assert default_eps_deg(grid32) == pytest.approx(0.5 * math.pi / 2.1)


def test_plan_frequencies_covers_grid(grid16):
    theta0 = (0.0, 1.0)
    planned, omitted = plan_frequencies(grid16, theta0, default_k_max(grid16), default_eps_deg(grid16))
    indices = [idx for idx, _, _ in planned] + [(o.i, o.j) for o in omitted]
    assert len(indices) == len(set(indices)) == 16 * 16
    assert [idx for idx, _, _ in planned] == sorted(idx for idx, _, _ in planned)
    reasons = {(o.i, o.j): o.reason for o in omitted}
    assert reasons[(0, 0)] == OmitReason.ZERO
    # xi2 = 0 row is degenerate for theta0 = e2
    assert all(reasons[(i, 0)] == OmitReason.DEGENERATE for i in range(1, 16))
    assert all(point.k <= default_k_max(grid16) for _, _, point in planned)
    assert OmitReason.CAPPED in reasons.values()


def test_plan_frequencies_xi_matches_grid(grid16):
    xi1, xi2 = frequency_axes(grid16)
    planned, _ = plan_frequencies(grid16, (0.6, 0.8), 1e6, 0.5)
    for idx, xi, point in planned:
        assert xi == (xi1[idx], xi2[idx])
        assert np.allclose(reconstruct_frequency(point, (0.6, 0.8)), xi, atol=1e-10)


def test_plan_frequencies_unbounded_cap():
    spec = make_grid(8, 2.1)
    planned, omitted = plan_frequencies(spec, (0.0, 1.0), 1e9, default_eps_deg(spec))
    assert {o.reason for o in omitted} == {OmitReason.ZERO, OmitReason.DEGENERATE}
    assert len(planned) == 64 - 8
