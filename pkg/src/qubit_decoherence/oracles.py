"""Ground-truth generators used to check the approximation schemes.

``adiabatic_exact`` is the closed-form independent-boson (pure dephasing)
solution. ``few_mode_exact`` propagates qubit plus a handful of explicit
oscillators in a truncated number basis.
"""
from dataclasses import dataclass
from itertools import product

import mpmath
import numpy as np
import scipy.sparse as sp

from .bath import Bath, DiscreteBath, thermal_factor
from .models import CouplingOperator, GateModel, commutes_with, coupling_vectors, ideal_propagator
from .pauli import PAULIS, as_operator, dagger

MAX_DIMENSION = 2 ** 16


class ConvergenceError(RuntimeError):
    pass


# --- closed-form pure dephasing -----------------------------------------------

def _damping_term(n, b, t):
    """``int_0^inf w^(n-2) e^(-b w) (1 - cos w t) dw``."""
    if n == 1:
        return 0.5 * mpmath.log(1 + (t / b) ** 2)
    return mpmath.gamma(n - 1) * (b ** (1 - n) - mpmath.re(mpmath.mpc(b, -t) ** (1 - n)))


def _phase_term(n, b, t):
    """``int_0^inf w^(n-2) e^(-b w) (sin w t - w t) dw``."""
    if n == 1:
        return mpmath.atan(t / b) - t / b
    return mpmath.gamma(n - 1) * mpmath.im(mpmath.mpc(b, -t) ** (1 - n)) - t * mpmath.gamma(n) * b ** (-n)


def dephasing_integrals(bath: Bath, t: float):
    """Closed forms of the damping and phase mode sums of pure dephasing.

    Returns ``(sum |g|^2 coth (1 - cos w t) / w^2, sum |g|^2 (sin w t - w t) / w^2)``.
    For a continuum bath at ``kT > 0`` the thermal factor is expanded in
    ``exp(-m w / kT)`` and the series is summed with mpmath.
    """
    if isinstance(bath, DiscreteBath):
        w, g2 = bath.frequencies, bath.couplings
        if len(w) == 0:
            return 0.0, 0.0
        coth = thermal_factor(w, bath.temperature)
        damp = float(np.sum(g2 * coth * (1 - np.cos(w * t)) / w ** 2))
        phase = float(np.sum(g2 * (np.sin(w * t) - w * t) / w ** 2))
        return damp, phase
    if t == 0 or bath.J == 0:
        return 0.0, 0.0
    n = mpmath.mpf(bath.n)
    s = mpmath.mpf(1) / bath.omega_c
    damp = _damping_term(n, s, t)
    if bath.temperature > 0:
        beta = mpmath.mpf(1) / bath.temperature
        damp += 2 * mpmath.nsum(lambda m: _damping_term(n, s + m * beta, t), [1, mpmath.inf])
    phase = _phase_term(n, s, t)
    return float(bath.J * damp), float(bath.J * phase)


def adiabatic_exact(bath: Bath, S: CouplingOperator, rho0, t: float, model: GateModel = None) -> np.ndarray:
    """Exact reduced density matrix when ``H_S`` commutes with ``S``.

    Populations in the eigenbasis of ``S`` follow the ideal evolution; the
    coherence between eigenvalues ``lam`` and ``lam'`` picks up
    ``exp(-(lam - lam')^2 damp - i (lam^2 - lam'^2) phase)``. With
    ``model=None`` there is no system Hamiltonian.
    """
    if model is not None and not commutes_with(model, S):
        raise ValueError("adiabatic_exact needs a gate model that commutes with S")
    rho0 = as_operator(rho0)
    u = ideal_propagator(model, t) if model is not None else np.eye(2, dtype=complex)
    rho_c = u @ rho0 @ dagger(u)
    damp, phase = dephasing_integrals(bath, t)
    lam = S.eigenvalues
    P = S.projectors()
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            d = -(lam[i] - lam[j]) ** 2 * damp - 1j * (lam[i] ** 2 - lam[j] ** 2) * phase
            out += np.exp(d) * P[i] @ rho_c @ P[j]
    return out


# --- explicit few-mode propagation -------------------------------------------

@dataclass(frozen=True)
class FewModeResult:
    rho: np.ndarray
    deviation: np.ndarray     # rho - rho_C, computed without cancellation
    norm_error: float         # max | <psi|psi> - 1 | over propagated global states
    steps: int


def _annihilators(nmodes, cutoff):
    d = cutoff + 1
    a = sp.diags(np.sqrt(np.arange(1, d)), 1, shape=(d, d), format="csr", dtype=complex)
    eye = sp.identity(d, format="csr", dtype=complex)
    ops = []
    for k in range(nmodes):
        mats = [eye] * nmodes
        mats[k] = a
        op = mats[0]
        for m in mats[1:]:
            op = sp.kron(op, m, format="csr")
        ops.append(op)
    return ops


def _initial_bath_states(dbath: DiscreteBath, pmin=1e-12):
    """Number states and weights of the (truncated) thermal bath state."""
    cutoff = dbath.fock_cutoff
    nm = len(dbath.modes)
    if dbath.temperature == 0:
        return [(0,) * nm], np.array([1.0])
    per_mode = []
    for w in dbath.frequencies:
        p = np.exp(-np.arange(cutoff + 1) * w / dbath.temperature)
        per_mode.append(p / p.sum())
    states, weights = [], []
    for occ in product(range(cutoff + 1), repeat=nm):
        p = np.prod([per_mode[k][n] for k, n in enumerate(occ)])
        if p >= pmin:
            states.append(occ)
            weights.append(p)
    weights = np.array(weights)
    return states, weights / weights.sum()


def _fock_index(occ, cutoff):
    idx = 0
    for n in occ:
        idx = idx * (cutoff + 1) + n
    return idx


class _InteractionHamiltonian:
    """``H_I(t) = s(t).sigma (x) sum_k g_k (e^{i w_k t} a_k^dag + h.c.)`` acting on stacks."""

    def __init__(self, dbath, model, S):
        self.model, self.S = model, S
        self.w = dbath.frequencies
        self.g = np.sqrt(dbath.couplings)
        self.a = _annihilators(len(self.w), dbath.fock_cutoff)
        self.ad = [op.getH().tocsr() for op in self.a]
        self.dim_b = self.a[0].shape[0] if self.a else 1

    def times_minus_i(self, t, vecs):
        """``-i H_I(t) @ vecs`` with ``vecs`` shaped (2, dim_b, nvec)."""
        xv = np.zeros_like(vecs)
        for g, w, a, ad in zip(self.g, self.w, self.a, self.ad):
            e = np.exp(1j * w * t)
            for s in range(2):
                xv[s] += g * (e * (ad @ vecs[s]) + np.conj(e) * (a @ vecs[s]))
        m = np.tensordot(coupling_vectors(self.model, self.S, [t])[0], PAULIS, axes=1)
        return -1j * np.einsum("st,tbv->sbv", m, xv)


def _expm1_apply(apply_omega, v, tol=1e-18, max_terms=40):
    """``(exp(Omega) - 1) v`` by Taylor series; ``Omega`` is small by construction."""
    term = apply_omega(v)
    total = term.copy()
    scale = max(np.max(np.abs(v)), 1e-300)
    for k in range(2, max_terms):
        term = apply_omega(term) / k
        total += term
        if np.max(np.abs(term)) <= tol * scale:
            return total
    raise ConvergenceError("Taylor series for the step exponential did not converge")


def _propagate(ham, phi0, t, nsteps):
    """Fourth-order Magnus integrator in the interaction picture; returns ``psi - phi0``."""
    h = t / nsteps
    c1, c2 = 0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6
    k = np.sqrt(3) / 12 * h * h
    eta = np.zeros_like(phi0)
    for step in range(nsteps):
        t1, t2 = (step + c1) * h, (step + c2) * h

        def omega(v, t1=t1, t2=t2):
            a1v = ham.times_minus_i(t1, v)
            a2v = ham.times_minus_i(t2, v)
            return 0.5 * h * (a1v + a2v) - k * (ham.times_minus_i(t1, a2v) - ham.times_minus_i(t2, a1v))

        eta = eta + _expm1_apply(omega, phi0 + eta)
    return eta


def few_mode_evolution(dbath: DiscreteBath, model: GateModel, S: CouplingOperator, rho0, t: float,
                       atol: float = 1e-8, rtol: float = 0.0, max_doublings: int = 10) -> FewModeResult:
    """Explicit qubit-plus-oscillators propagation, traced over the bath.

    The global state is evolved in the interaction picture with respect to
    ``H_S(t) + H_B``, tracking only its departure from the initial product
    state, so the O(g^2) deviation of the reduced state keeps full relative
    precision. The step starts at ``0.05 / scale`` (``scale`` bounding both
    ``||H_I||`` and the fastest phase rotation) and is halved until two
    successive deviations agree within ``atol + rtol * |deviation|``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    nm = len(dbath.modes)
    dim = 2 * (dbath.fock_cutoff + 1) ** nm
    if dim > MAX_DIMENSION:
        raise ValueError(f"product-space dimension {dim} exceeds the guard {MAX_DIMENSION}")
    rho0 = as_operator(rho0)
    u = ideal_propagator(model, t)
    rho_c = u @ rho0 @ dagger(u)
    if t == 0 or nm == 0 or not np.any(dbath.couplings > 0):
        return FewModeResult(rho_c, np.zeros((2, 2), dtype=complex), 0.0, 0)

    ham = _InteractionHamiltonian(dbath, model, S)
    states, weights = _initial_bath_states(dbath)
    nb = len(states)
    # column (s, j): system basis state s times bath number state j
    phi0 = np.zeros((2, ham.dim_b, 2 * nb), dtype=complex)
    for j, occ in enumerate(states):
        idx = _fock_index(occ, dbath.fock_cutoff)
        for s in range(2):
            phi0[s, idx, 2 * j + s] = 1.0

    hnorm = np.linalg.norm(S.vector) * np.sum(2 * ham.g * np.sqrt(dbath.fock_cutoff))
    scale = max(hnorm, float(dbath.frequencies.max()) + model.max_frequency(), 1e-12)
    nsteps = max(1, int(np.ceil(t * scale / 0.05)))

    def reduced_deviation(eta):
        # Tr_B |a><b| for every pair of propagated columns, then weight by rho0.
        psi_cross = np.einsum("sbv,tbw->vwst", phi0, eta.conj())
        cross = psi_cross + np.conj(np.swapaxes(np.swapaxes(psi_cross, 0, 1), 2, 3))
        cross += np.einsum("sbv,tbw->vwst", eta, eta.conj())
        out = np.zeros((2, 2), dtype=complex)
        for j in range(nb):
            block = cross[2 * j:2 * j + 2, 2 * j:2 * j + 2]
            out += weights[j] * np.einsum("vw,vwst->st", rho0, block)
        return out

    prev = reduced_deviation(_propagate(ham, phi0, t, nsteps))
    for _ in range(max_doublings):
        nsteps *= 2
        eta = _propagate(ham, phi0, t, nsteps)
        cur = reduced_deviation(eta)
        diff = np.max(np.abs(cur - prev))
        if diff <= atol + rtol * np.max(np.abs(cur)):
            break
        prev = cur
    else:
        raise ConvergenceError(f"few-mode propagation not converged: halving the step changed rho by {diff:.3e}")
    norms = 2 * np.real(np.einsum("sbv,sbv->v", phi0.conj(), eta)) + np.einsum("sbv,sbv->v", eta.conj(), eta).real
    dev = u @ cur @ dagger(u)
    return FewModeResult(rho_c + dev, dev, float(np.max(np.abs(norms))), nsteps)


def few_mode_exact(dbath: DiscreteBath, model: GateModel, S: CouplingOperator, rho0, t: float, **kwargs) -> np.ndarray:
    """Reduced density matrix from explicit few-mode propagation."""
    return few_mode_evolution(dbath, model, S, rho0, t, **kwargs).rho
