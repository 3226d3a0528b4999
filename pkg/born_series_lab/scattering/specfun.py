"""Real-argument Bessel and outgoing Hankel functions of orders 0 and 1.

Thin wrappers over `scipy.special` that enforce the domains the resolvent needs. They accept scalars or arrays.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from born_series_lab.scattering.excs import SpecialFunctionDomainError

_J = {0: special.j0, 1: special.j1}
_Y = {0: special.y0, 1: special.y1}


def _check_order(order: int) -> None:
    if order not in (0, 1):
        error_msg = f"only orders 0 and 1 are supported, got {order}"
        raise SpecialFunctionDomainError(error_msg)


def _unwrap(value):
    return value.item() if isinstance(value, np.ndarray) and value.ndim == 0 else value


def bessel_j(order: int, x):
    """J_order(x) for x >= 0.

    Raises:
        SpecialFunctionDomainError: On an unsupported order or a negative argument
    """
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        error_msg = "bessel_j requires x >= 0"
        raise SpecialFunctionDomainError(error_msg)
    return _unwrap(_J[order](x))


def bessel_y(order: int, x):
    """Y_order(x) for x > 0 (logarithmic singularity at the origin).

    Raises:
        SpecialFunctionDomainError: On an unsupported order or a non-positive argument
    """
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        error_msg = "bessel_y requires x > 0"
        raise SpecialFunctionDomainError(error_msg)
    return _unwrap(_Y[order](x))


def hankel1(order: int, x):
    """Outgoing Hankel function H^(1)_order(x) = J_order(x) + i Y_order(x) for x > 0.

    Raises:
        SpecialFunctionDomainError: On an unsupported order or a non-positive argument
    """
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        error_msg = "hankel1 requires x > 0"
        raise SpecialFunctionDomainError(error_msg)
    return _unwrap(_J[order](x) + 1j * _Y[order](x))
