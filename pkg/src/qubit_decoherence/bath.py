"""Bosonic bath descriptions and the frequency quadrature used for mode sums.

A continuum bath carries the weight ``J w^n exp(-w / omega_c)`` (density of
modes times squared coupling); a discrete bath is a finite list of
``(w_k, |g_k|^2)`` pairs. Both expose the same two bath correlation
functions, so the engines never need to know which one they were handed.
"""
from dataclasses import dataclass, field
from math import gamma, pi
from typing import Callable, Union

import numpy as np


class QuadratureError(RuntimeError):
    """Adaptive integration ran out of budget before meeting its tolerance."""

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error:.3e})")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-16
    tail_cut: float = 60.0
    omega_eps: float = 1e-6     # in units of omega_c
    max_panels: int = 200_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_cut", "omega_eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.tail_cut < 20:
            raise ValueError("tail_cut must be at least 20")


@dataclass(frozen=True)
class BathSpectrum:
    """Continuum bath with weight ``J w^n exp(-w / omega_c)`` at temperature ``kT``."""

    J: float
    n: float
    omega_c: float
    temperature: float = 0.0

    def __post_init__(self):
        if self.J < 0:
            raise ValueError("J must be non-negative")
        if not self.n > 0:
            raise ValueError("n must be positive")
        if not self.omega_c > 0:
            raise ValueError("omega_c must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")

    def weight(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.J * omega ** self.n * np.exp(-omega / self.omega_c)

    def frequency_scale(self) -> float:
        return self.omega_c

    def correlation(self, tau):
        """``(C(tau), K(tau))`` with ``C = int weight coth(w/2kT) cos(w tau)`` and
        ``K = int weight sin(w tau)``, in closed form.

        At ``kT > 0`` the thermal factor is expanded as
        ``1 + 2 sum_m exp(-m w / kT)``; every term integrates to a complex
        power and the tail of the series is summed by Euler-Maclaurin.
        """
        tau = np.asarray(tau, dtype=float)
        p = self.n + 1.0
        pref = self.J * gamma(p)
        b = 1.0 / self.omega_c - 1j * tau
        base = b ** (-p)
        corr = base.real.copy()
        if self.temperature > 0:
            corr += 2.0 * _power_series_tail(b, 1.0 / self.temperature, p).real
        return pref * corr, pref * base.imag

    def with_coupling(self, J: float) -> "BathSpectrum":
        return BathSpectrum(J, self.n, self.omega_c, self.temperature)


@dataclass(frozen=True)
class DiscreteBath:
    """Finitely many modes ``(w_k, |g_k|^2)``; also the oracle bath.

    ``fock_cutoff`` is the maximum occupation kept per mode when the bath is
    propagated explicitly.
    """

    modes: tuple
    fock_cutoff: int = 8
    temperature: float = 0.0
    frequencies: np.ndarray = field(init=False, repr=False)
    couplings: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        modes = tuple((float(w), float(g2)) for w, g2 in self.modes)
        object.__setattr__(self, "modes", modes)
        w = np.array([m[0] for m in modes], dtype=float)
        g2 = np.array([m[1] for m in modes], dtype=float)
        if np.any(w <= 0):
            raise ValueError("mode frequencies must be positive")
        if np.any(g2 < 0):
            raise ValueError("squared couplings must be non-negative")
        if self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be at least 1")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "couplings", g2)

    def frequency_scale(self) -> float:
        return float(self.frequencies.max()) if len(self.frequencies) else 1.0

    def correlation(self, tau):
        tau = np.asarray(tau, dtype=float)
        coth = thermal_factor(self.frequencies, self.temperature) if len(self.modes) else np.zeros(0)
        phase = np.multiply.outer(tau, self.frequencies)
        corr = np.cos(phase) @ (self.couplings * coth)
        sin = np.sin(phase) @ self.couplings
        return corr, sin

    def with_coupling(self, g2: float) -> "DiscreteBath":
        """Copy with every ``|g_k|^2`` set to ``g2``."""
        return DiscreteBath(tuple((w, g2) for w, _ in self.modes), self.fock_cutoff, self.temperature)

    def scaled(self, factor: float) -> "DiscreteBath":
        return DiscreteBath(tuple((w, factor * g2) for w, g2 in self.modes), self.fock_cutoff, self.temperature)


Bath = Union[BathSpectrum, DiscreteBath]


def _power_series_tail(b, beta, p, direct=16):
    """``sum_{m>=1} (b + m beta)^(-p)`` for complex ``b`` with ``Re b > 0``."""
    total = np.zeros(np.shape(b), dtype=complex)
    for m in range(1, direct):
        total += (b + m * beta) ** (-p)
    z = b + direct * beta
    total += z ** (1.0 - p) / (beta * (p - 1.0)) + 0.5 * z ** (-p)
    # Euler-Maclaurin: -sum_k B_2k/(2k)! h^(2k-1)(M), h^(j) = (-1)^j (p)_j beta^j z^(-p-j)
    bern = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0)
    fact = (2.0, 24.0, 720.0, 40320.0)
    for k, (b2k, f2k) in enumerate(zip(bern, fact), start=1):
        j = 2 * k - 1
        rising = np.prod([p + i for i in range(j)])
        total += b2k / f2k * rising * beta ** j * z ** (-p - j)
    return total


def thermal_factor(omega, kT: float):
    """``coth(w / 2kT)``, exactly 1 at ``kT = 0``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("thermal factor needs positive frequencies")
    if kT == 0:
        return np.ones_like(omega)
    x = omega / (2.0 * kT)
    small = x < 1e-4
    out = np.empty_like(x)
    out[small] = 1.0 / x[small] + x[small] / 3.0
    out[~small] = 1.0 / np.tanh(x[~small])
    return out if out.ndim else float(out)


# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk_panels(f, lo, hi):
    """Kronrod value and |Kronrod - Gauss| per panel for a vector-valued ``f``."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * GK_NODES[None, :]
    vals = f(nodes.ravel())
    vals = vals.reshape(nodes.shape + vals.shape[1:])
    kron = np.einsum("pj...,j->p...", vals, GK_WEIGHTS) * _expand(half, vals.ndim - 1)
    gauss = np.einsum("pj...,j->p...", vals, _G_WEIGHTS) * _expand(half, vals.ndim - 1)
    err = np.abs(kron - gauss)
    if err.ndim > 1:
        err = err.reshape(len(lo), -1).max(axis=1)
    return kron, err


def _expand(a, extra):
    return a.reshape(a.shape + (1,) * (extra - 1)) if extra > 1 else a


def adaptive_integrate(f, a: float, b: float, max_width: float, rel_tol: float = 1e-9,
                       abs_tol: float = 1e-16, max_panels: int = 200_000):
    """Globally adaptive Gauss-Kronrod integration of a vectorised ``f`` over [a, b].

    ``f`` maps a 1-d array of nodes to an array whose leading axis matches the
    nodes; trailing axes are integrated componentwise. Panels never exceed
    ``max_width``. Returns ``(value, error_estimate)``.
    """
    if b <= a:
        return 0.0, 0.0
    npan = max(1, int(np.ceil((b - a) / max_width)))
    edges = np.linspace(a, b, npan + 1)
    lo, hi = edges[:-1], edges[1:]
    val, err = _gk_panels(f, lo, hi)
    while True:
        total = val.sum(axis=0)
        total_err = float(err.sum())
        target = max(rel_tol * float(np.max(np.abs(total))), abs_tol)
        if total_err <= target:
            return total, total_err
        if len(lo) >= max_panels:
            raise QuadratureError("adaptive quadrature exceeded its panel budget", total, total_err)
        share = target * (hi - lo) / (b - a)
        bad = err > share
        if not np.any(bad):
            bad = err >= err.max()
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[bad], mid])
        new_hi = np.concatenate([mid, hi[bad]])
        nval, nerr = _gk_panels(f, new_lo, new_hi)
        keep = ~bad
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])


def spectral_integral(bath: BathSpectrum, kernel: Callable, t: float, q: QuadratureSpec = None,
                      small_omega: Callable = None):
    """``int_0^inf J w^n exp(-w/omega_c) kernel(w, t) dw`` truncated at ``tail_cut * omega_c``.

    Panels are at most ``pi / t`` wide so oscillations in ``t`` are resolved.
    Below ``omega_eps * omega_c`` the optional ``small_omega(w, t)`` replaces
    ``kernel`` (analytic small-frequency limit). Raises ``QuadratureError``
    carrying the best estimate when the panel budget is exhausted.
    """
    q = q or QuadratureSpec()
    if bath.J == 0:
        probe = np.asarray(kernel(np.array([bath.omega_c]), t))
        return np.zeros(probe.shape[1:], dtype=probe.dtype) if probe.ndim > 1 else probe.dtype.type(0)
    eps = q.omega_eps * bath.omega_c

    def integrand(w):
        k = np.asarray(kernel(w, t))
        if small_omega is not None:
            low = w < eps
            if np.any(low):
                k = k.copy() if k.dtype.kind == "c" else k.astype(np.result_type(k, float))
                k[low] = small_omega(w[low], t)
        wt = bath.weight(w)
        return k * wt.reshape(wt.shape + (1,) * (k.ndim - 1))

    width = bath.omega_c
    if t > 0:
        width = min(width, pi / t)
    value, _ = adaptive_integrate(integrand, 0.0, q.tail_cut * bath.omega_c, width,
                                  q.rel_tol, q.abs_tol, q.max_panels)
    return value


def discrete_mode_sum(modes, kernel: Callable, t: float):
    """``sum_k |g_k|^2 kernel(w_k, t)`` over ``(w_k, |g_k|^2)`` pairs."""
    if isinstance(modes, DiscreteBath):
        modes = modes.modes
    if len(modes) == 0:
        return 0.0
    w = np.array([m[0] for m in modes], dtype=float)
    g2 = np.array([m[1] for m in modes], dtype=float)
    if np.any(w <= 0):
        raise ValueError("mode frequencies must be positive")
    k = np.asarray(kernel(w, t))
    return np.tensordot(g2, k, axes=(0, 0))


def mode_sum(bath: Bath, kernel: Callable, t: float, q: QuadratureSpec = None, small_omega: Callable = None):
    """Dispatch a mode sum to the continuum quadrature or the discrete sum."""
    if isinstance(bath, DiscreteBath):
        return discrete_mode_sum(bath, kernel, t)
    return spectral_integral(bath, kernel, t, q, small_omega)
