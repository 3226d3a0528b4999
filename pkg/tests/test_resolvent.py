from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from scipy import integrate, special

from born_series_lab.scattering.excs import ResolventError
from born_series_lab.scattering.grid import frequency_magnitude, make_grid, physical_axes
from born_series_lab.scattering.resolvent import (
    SymbolCache,
    apply_resolvent,
    generic_symbol,
    kernel_symbol,
    resonant_limit,
)
from born_series_lab.scattering.schema import Field
from tests.conftest import bump, gaussian

RHO = 2.1


def kernel(r, k):
    return -0.25j * special.hankel1(0, k * r)


def quad_complex(func, a, b, **kwargs):
    real, _ = integrate.quad(lambda r: func(r).real, a, b, limit=400, **kwargs)
    imag, _ = integrate.quad(lambda r: func(r).imag, a, b, limit=400, **kwargs)
    return complex(real, imag)


def symbol_oracle(s, k, rho=RHO):
    """2 pi int_0^rho r G(r) J0(s r) dr"""
    return 2 * np.pi * quad_complex(lambda r: r * kernel(r, k) * special.j0(s * r), 0, rho, epsabs=1e-13)


def gaussian_response(a, k, width, rho=RHO):
    """Truncated-kernel convolution of exp(-|y|^2 / (2 width^2)) evaluated at |x| = a"""
    points = [a] if 0 < a < rho else None

    def integrand(r):
        angular = special.i0e(a * r / width**2) * np.exp(-((a - r) ** 2) / (2 * width**2))
        return 2 * np.pi * r * kernel(r, k) * angular

    return quad_complex(integrand, 0, rho, points=points, epsabs=1e-14)


@pytest.mark.parametrize("k", [1.0, 2.0, 5.0, 9.5])
def test_symbol_matches_quadrature(k):
    spec = make_grid(64, 2.1)
    symbol = kernel_symbol(spec, k, RHO)
    s = frequency_magnitude(spec)
    for idx in [(0, 0), (1, 0), (2, 3), (5, 1), (9, 30), (32, 32), (31, 17), (20, 44)]:
        expected = symbol_oracle(s[idx], k)
        assert abs(symbol.values[idx] - expected) <= 1e-3 * abs(expected)


def test_symbol_at_largest_frequencies_matches_quadrature():
    spec = make_grid(128, 2.1)
    symbol = kernel_symbol(spec, 1.0, RHO)
    s = frequency_magnitude(spec)
    idx = np.unravel_index(np.argmax(s), s.shape)
    expected = symbol_oracle(s[idx], 1.0)
    assert abs(symbol.values[idx] - expected) <= 1e-3 * abs(expected)
    # decays like 1/|xi|^2 up to a bounded oscillating factor
    assert abs(symbol.values[idx] * s[idx] ** 2) < 2 + RHO * np.sqrt(s[idx] * RHO)


def test_resonant_limit_is_continuous():
    k = 1.0
    delta = 1e-4
    average = 0.5 * (generic_symbol(k * (1 + delta), k, RHO) + generic_symbol(k * (1 - delta), k, RHO))
    assert abs(resonant_limit(k, RHO) - average) <= 1e-6 * abs(resonant_limit(k, RHO))


def test_resonant_bin_uses_limit():
    spec = make_grid(32, 2.1)
    k = 3 * np.pi / 2.1
    symbol = kernel_symbol(spec, k, RHO)
    assert np.all(np.isfinite(symbol.values))
    assert symbol.values[3, 0] == resonant_limit(k, RHO)
    assert symbol.values[0, 29] == resonant_limit(k, RHO)


def test_symbol_is_radial():
    spec = make_grid(32, 2.1)
    values = kernel_symbol(spec, 2.0).values
    for i, j in [(1, 2), (3, 7), (5, 11), (15, 4)]:
        assert values[i, j] == values[j, i]
        assert values[i, j] == values[(32 - i) % 32, j]
        assert values[i, j] == values[i, (32 - j) % 32]


@pytest.mark.parametrize("k, radius", [(0.0, RHO), (-1.0, RHO), (1.0, 0.0), (1.0, 4.3)])
def test_kernel_symbol_rejects(k, radius):
    with pytest.raises(ResolventError):
        kernel_symbol(make_grid(16, 2.1), k, radius)


def test_apply_zero_and_linearity(grid32, rng):
    symbol = kernel_symbol(grid32, 1.5)
    assert not np.any(apply_resolvent(symbol, Field.zeros(grid32)).data)
    f = Field(spec=grid32, data=rng.standard_normal((32, 32)))
    g = Field(spec=grid32, data=rng.standard_normal((32, 32)) * 1j)
    a, b = 2.5, -0.75 + 0.5j
    combined = apply_resolvent(symbol, Field(spec=grid32, data=a * f.data + b * g.data)).data
    separate = a * apply_resolvent(symbol, f).data + b * apply_resolvent(symbol, g).data
    assert np.linalg.norm(combined - separate) <= 1e-12 * np.linalg.norm(separate)


def test_apply_rejects_other_grid(grid16, grid32):
    with pytest.raises(ResolventError):
        apply_resolvent(kernel_symbol(grid32, 1.0), Field.zeros(grid16))


@pytest.mark.parametrize("k", [1.0, 2.0, 5.0])
def test_apply_matches_truncated_convolution(k):
    spec = make_grid(32, 2.1)
    width = 0.2
    u = apply_resolvent(kernel_symbol(spec, k, RHO), gaussian(spec, width)).data
    x1, x2 = physical_axes(spec)
    middle = spec.n // 2
    # nodes along the x1 axis and the diagonal out to |x| = 1.4
    nodes = [(i, middle) for i in range(middle, spec.n) if x1[i, middle] <= 1.4]
    nodes += [(i, i) for i in range(middle, spec.n) if np.hypot(x1[i, i], x2[i, i]) <= 1.4]
    expected = np.array([gaussian_response(float(np.hypot(x1[node], x2[node])), k, width) for node in nodes])
    computed = np.array([u[node] for node in nodes])
    assert np.max(np.abs(computed - expected)) <= 1e-3 * np.max(np.abs(expected))


def helmholtz_residual(n, k):
    spec = make_grid(n, 2.1)
    f = bump(spec)
    u = apply_resolvent(kernel_symbol(spec, k, RHO), f).data
    h = spec.spacing
    laplacian = (np.roll(u, 1, 0) + np.roll(u, -1, 0) + np.roll(u, 1, 1) + np.roll(u, -1, 1) - 4 * u) / h**2
    x1, x2 = physical_axes(spec)
    inside = np.hypot(x1, x2) <= 1.0
    return np.max(np.abs((laplacian + k**2 * u - f.data)[inside]))


@pytest.mark.parametrize("k", [1.0, 2.0])
def test_helmholtz_residual_order(k):
    coarse = helmholtz_residual(32, k)
    fine = helmholtz_residual(64, k)
    assert np.log2(coarse / fine) >= 1.8


def test_outgoing_sign(grid32):
    f = bump(grid32)
    u = apply_resolvent(kernel_symbol(grid32, 1.0), f)
    assert np.sum(u.data * np.conj(f.data)).imag < 0


def test_symbol_cache():
    spec = make_grid(16, 2.1)
    cache = SymbolCache()
    first = cache.get(spec, 2.0)
    assert cache.get(spec, 2.0 * (1 + 1e-14)) is first
    assert cache.get(spec, 2.5) is not first
    assert len(cache) == 2
    assert (cache.hits, cache.misses) == (1, 2)


def test_symbol_cache_evicts_least_recent():
    spec = make_grid(16, 2.1)
    cache = SymbolCache(max_bytes=2 * 16 * 16 * 16)
    first = cache.get(spec, 1.0)
    cache.get(spec, 2.0)
    cache.get(spec, 1.0)
    cache.get(spec, 3.0)
    assert len(cache) == 2
    assert cache.get(spec, 1.0) is first
    assert cache.misses == 3


def test_symbol_cache_concurrent_get():
    spec = make_grid(16, 2.1)
    cache = SymbolCache()
    wavenumbers = [1.0, 2.0, 3.0] * 20
    with ThreadPoolExecutor(max_workers=8) as executor:
        symbols = list(executor.map(lambda k: cache.get(spec, k), wavenumbers))
    assert len(cache) == 3
    for k, symbol in zip(wavenumbers, symbols):
        assert symbol is cache.get(spec, k)
