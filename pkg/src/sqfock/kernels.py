"""Backend selection for the Fock-projection kernel.

The compiled extension is used when it imports; otherwise the numpy
implementation takes over. Both expose ``project_one`` and ``project_all``
with identical semantics, see :mod:`sqfock._kernel_py`.
"""

import numpy as np

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernel_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

_active = "cython" if _compiled is not None else "python"


def available_backends():
    return sorted(_BACKENDS)


def backend():
    """Name of the backend currently in use."""
    return _active


def set_backend(name):
    """Switch backend; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    previous, _active = _active, name
    return previous


def _flat(alpha, beta, gamma):
    beta = np.asarray(beta, dtype=complex)
    shape = beta.shape
    beta = beta.ravel()
    alpha = np.broadcast_to(np.asarray(alpha, dtype=complex), shape).ravel()
    gamma = np.broadcast_to(np.asarray(gamma, dtype=complex), shape).ravel()
    return shape, np.ascontiguousarray(alpha), np.ascontiguousarray(beta), np.ascontiguousarray(gamma)


def project_one(n, alpha, beta, gamma, rule):
    """``int phi_n(x) exp(-alpha x^2/2 - beta x + gamma) dx`` elementwise.

    ``alpha`` and ``gamma`` broadcast against ``beta``; ``rule`` is a
    Gauss-Hermite :class:`~sqfock.numerics.QuadratureRule`.
    """
    shape, a, b, g = _flat(alpha, beta, gamma)
    out = _BACKENDS[_active].project_one(int(n), a, b, g, rule.nodes, rule.weights)
    return out.reshape(shape)


def project_all(n_max, alpha, beta, gamma, rule):
    """Like :func:`project_one` for every order ``0..n_max``; leading axis is the order."""
    shape, a, b, g = _flat(alpha, beta, gamma)
    out = _BACKENDS[_active].project_all(int(n_max), a, b, g, rule.nodes, rule.weights)
    return out.reshape((n_max + 1,) + shape)
