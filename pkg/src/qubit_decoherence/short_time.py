"""Short-time factorisation of the total propagator.

The total evolution operator is approximated by
``W_S exp(-i (H_B + H_SB) t) W_S`` with ``W_S = sqrt(U_S)``, which is exact
through second order in time and reduces the bath trace to the
pure-dephasing problem in the eigenbasis of ``S``.
"""
from dataclasses import dataclass

import numpy as np

from .bath import Bath, QuadratureSpec, mode_sum, thermal_factor
from .channel import DecoherenceMap
from .models import CouplingOperator, GateModel, ideal_propagator
from .pauli import unitary_sqrt


def _sin_minus_x(x):
    """``sin(x) - x`` without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    out = np.sin(x) - x
    xs = x[small]
    x2 = xs * xs
    out[small] = xs * x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (-1.0 / 5040.0 + x2 / 362880.0)))
    return out


def damping_kernel(kT: float):
    """``2 sin^2(w t / 2) / w^2 * coth(w / 2kT)`` and its small-w limit."""
    def kernel(w, t):
        return 2.0 * np.sin(0.5 * w * t) ** 2 / w ** 2 * thermal_factor(w, kT)

    def small(w, t):
        return 0.5 * t * t * thermal_factor(w, kT)

    return kernel, small


def phase_kernel(w, t):
    """``(sin w t - w t) / w^2``."""
    return _sin_minus_x(w * t) / w ** 2


def _phase_small(w, t):
    return -w * t ** 3 / 6.0


def damping_integral(bath: Bath, t: float, q: QuadratureSpec = None) -> float:
    kernel, small = damping_kernel(bath.temperature)
    return float(mode_sum(bath, kernel, t, q, small))


def phase_integral(bath: Bath, t: float, q: QuadratureSpec = None) -> float:
    return float(mode_sum(bath, phase_kernel, t, q, _phase_small))


def short_time_decoherence(bath: Bath, lam: float, lam_p: float, t: float, q: QuadratureSpec = None) -> complex:
    """Decoherence exponent ``D_{lam, lam'}(t)`` of the short-time scheme.

    Both kernels carry ``w^2`` denominators:
    ``Re D = -(lam - lam')^2 sum_k 2|g_k|^2 sin^2(w_k t/2) coth(w_k/2kT) / w_k^2`` and
    ``Im D = -(lam^2 - lam'^2) sum_k |g_k|^2 (sin w_k t - w_k t) / w_k^2``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    re_pref = (lam - lam_p) ** 2
    im_pref = lam * lam - lam_p * lam_p
    re = -re_pref * damping_integral(bath, t, q) if re_pref != 0 else 0.0
    im = -im_pref * phase_integral(bath, t, q) if im_pref != 0 else 0.0
    return complex(re, im)


@dataclass(frozen=True)
class ShortTimeDecoherence:
    """Exponents indexed by the ordered eigenvalue pairs of ``S`` (plus first)."""

    D: np.ndarray
    eigenvalues: np.ndarray
    t: float

    def pairs(self):
        lam = self.eigenvalues
        return [((lam[i], lam[j]), self.D[i, j]) for i in range(2) for j in range(2)]


def short_time_table(bath: Bath, S: CouplingOperator, t: float, q: QuadratureSpec = None) -> ShortTimeDecoherence:
    lam = S.eigenvalues
    re_int = damping_integral(bath, t, q)
    im_int = phase_integral(bath, t, q) if abs(lam[0] ** 2 - lam[1] ** 2) > 0 else 0.0
    D = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            if i != j:
                D[i, j] = complex(-(lam[i] - lam[j]) ** 2 * re_int, -(lam[i] ** 2 - lam[j] ** 2) * im_int)
    return ShortTimeDecoherence(D, lam.copy(), t)


def short_time_channel(model: GateModel, S: CouplingOperator, bath: Bath, t: float,
                       q: QuadratureSpec = None, branch=(0, 0)) -> DecoherenceMap:
    """Reduced dynamics ``sum exp(D) (W P_lam W) rho0 (W P_lam' W)^dag``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    u = ideal_propagator(model, t)
    w = unitary_sqrt(u, branch)
    ops = np.einsum("ij,ajk,kl->ail", w, S.projectors(), w)
    table = short_time_table(bath, S, t, q)
    return DecoherenceMap(ops, table.D, u, t, info={"table": table, "sqrt": w})


def evolve_short_time(model: GateModel, S: CouplingOperator, bath: Bath, rho0, t: float,
                      branch=(0, 0), q: QuadratureSpec = None) -> np.ndarray:
    """Reduced density matrix of the short-time scheme at time ``t``."""
    return short_time_channel(model, S, bath, t, q, branch).apply(rho0)
