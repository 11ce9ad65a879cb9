"""Decoherence measures built on the deviation ``chi = rho_S - rho_C``."""
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.optimize import minimize

from .bath import Bath, QuadratureSpec
from .magnus import magnus_channel
from .models import CouplingOperator, GateModel
from .pauli import pure_state
from .short_time import short_time_channel

GRID_THETA = 64
GRID_PHI = 128


@dataclass(frozen=True)
class DeviationReport:
    chi: np.ndarray
    norm: float
    population_deviation: float


def lambda_norm(chi) -> float:
    """Largest eigenvalue magnitude of a Hermitian deviation operator.

    For a traceless 2x2 operator this is ``sqrt(chi_00^2 + |chi_01|^2)``;
    a residual trace is handled by the general eigenvalue formula.
    """
    chi = np.asarray(chi, dtype=complex)
    mean = 0.5 * (chi[..., 0, 0].real + chi[..., 1, 1].real)
    half = 0.5 * (chi[..., 0, 0].real - chi[..., 1, 1].real)
    radius = np.hypot(half, np.abs(chi[..., 0, 1]))
    out = np.abs(mean) + radius
    return float(out) if np.ndim(out) == 0 else out


def report_from_chi(chi) -> DeviationReport:
    chi = np.asarray(chi, dtype=complex)
    return DeviationReport(chi, lambda_norm(chi), float(chi[0, 0].real))


def deviation(rho_s, rho_c) -> DeviationReport:
    """Deviation operator, its lambda-norm and the ``|+><+|`` population shift.

    Examples
    --------
    >>> chi = np.array([[3e-6, 4e-6], [4e-6, -3e-6]])
    >>> round(deviation(chi, np.zeros((2, 2))).norm * 1e6, 12)
    5.0
    """
    return report_from_chi(np.asarray(rho_s, dtype=complex) - np.asarray(rho_c, dtype=complex))


def _channel_factory(evolver):
    if evolver in ("short_time", "short-time"):
        return short_time_channel
    if evolver == "magnus":
        return magnus_channel
    raise ValueError(f"unknown scheme {evolver!r}")


def maximize_over_initial_states(evolver: Union[str, Callable], model: GateModel, S: CouplingOperator,
                                 bath: Bath, t: float, q: QuadratureSpec = None, xatol: float = 1e-4):
    """Supremum of the lambda-norm over pure initial states.

    ``evolver`` is either a scheme name (``"short_time"``/``"magnus"``),
    in which case the channel is built once and applied to the whole grid,
    or a callable ``(model, S, bath, rho0, t) -> rho``. The 64x128 Bloch grid
    uses ``theta_i = i pi / 63`` and ``phi_j = 2 pi j / 128``; the best grid
    point (lowest flat index on ties) seeds a Nelder-Mead refinement and the
    refined value is kept only if it improves on the grid.

    Returns
    -------
    norm_max : float
    angles : tuple of float
        ``(theta, phi)`` of the maximizer.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    theta = np.arange(GRID_THETA) * np.pi / (GRID_THETA - 1)
    phi = np.arange(GRID_PHI) * 2 * np.pi / GRID_PHI
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    states = pure_state(tt, pp)

    if isinstance(evolver, str):
        channel = _channel_factory(evolver)(model, S, bath, t, q)

        def measure(rho0):
            return lambda_norm(channel.deviation(rho0))
    else:
        from .models import ideal_density

        def measure(rho0):
            rho0 = np.asarray(rho0)
            if rho0.ndim == 2:
                return lambda_norm(evolver(model, S, bath, rho0, t) - ideal_density(model, rho0, t))
            flat = rho0.reshape(-1, 2, 2)
            return np.array([measure(r) for r in flat]).reshape(rho0.shape[:-2])

    values = np.asarray(measure(states))
    best = int(np.argmax(values))
    i, j = np.unravel_index(best, values.shape)
    best_value, best_angles = float(values[i, j]), (float(theta[i]), float(phi[j]))

    res = minimize(lambda x: -float(measure(pure_state(x[0], x[1]))), np.array(best_angles),
                   method="Nelder-Mead", options={"xatol": xatol, "fatol": 0.0, "maxiter": 400})
    if -res.fun > best_value:
        th, ph = float(res.x[0]), float(res.x[1])
        # fold back to the canonical chart
        if th < 0:
            th, ph = -th, ph + np.pi
        if th > np.pi:
            th, ph = 2 * np.pi - th, ph + np.pi
        best_value, best_angles = float(-res.fun), (th, float(np.mod(ph, 2 * np.pi)))
    return best_value, best_angles
