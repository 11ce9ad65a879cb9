"""Second-order Magnus (weak-coupling) scheme.

The interaction-picture propagator ``exp[-i(Omega_1 + Omega_2)]`` is split
into ``exp(-i sigma_x B_x) exp(-i sigma_y B_y) exp(-i sigma_z B_z)`` times a
second-order remainder whose thermal average is a c-number spin rotation.
Resolving each factor in the eigenbasis of its Pauli matrix gives

    rho_S(t) = sum_{x, x'} exp(D_{x x'}) U_S M_x rho0 M_{x'}^dag U_S^dag,
    M_x = |x><x|y><y|z><z|,

with ``x = (x, y, z)`` a sign triple. Every exponent is a bilinear form in
the mode sums

    R_ij = sum_k |g_k|^2 coth(w_k/2kT) (f_i f_j + ft_i ft_j)
    C_ij = sum_k |g_k|^2 (f_i ft_j - ft_i f_j)
    Y_j  = sum_k |g_k|^2 coth(w_k/2kT) Y_kj

of the spin kernels ``f``, ``ft`` (cosine / sine transforms of the
interaction-picture coupling vector) and the double-time kernel ``Y``.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from .bath import Bath, BathSpectrum, DiscreteBath, QuadratureError, QuadratureSpec, mode_sum, thermal_factor
from .channel import DecoherenceMap
from .models import CouplingOperator, GateModel, coupling_vectors, ideal_propagator
from .pauli import ket_bra

SIGNS = np.array(list(product((1, -1), repeat=3)), dtype=float)

_EIGENKETS = {
    0: {1: np.array([1, 1]) / np.sqrt(2), -1: np.array([1, -1]) / np.sqrt(2)},
    1: {1: np.array([1, 1j]) / np.sqrt(2), -1: np.array([1, -1j]) / np.sqrt(2)},
    2: {1: np.array([1, 0], dtype=complex), -1: np.array([0, 1], dtype=complex)},
}


def projector_chain(signs) -> np.ndarray:
    """``|x><x|y><y|z><z|`` for a sign triple ``(x, y, z)``."""
    x, y, z = (_EIGENKETS[k][int(s)] for k, s in enumerate(signs))
    return ket_bra(x, x) @ ket_bra(y, y) @ ket_bra(z, z)


def projector_chains() -> np.ndarray:
    """All eight chains in the order of ``SIGNS``, shape (8, 2, 2)."""
    return np.stack([projector_chain(s) for s in SIGNS])


# --- time quadrature helpers -------------------------------------------------

def _gauss_legendre(m):
    x, w = np.polynomial.legendre.leggauss(m)
    return x, w


def _cumulative_matrix(m):
    """``Q[k, l] = int_{-1}^{x_k} L_l(x) dx`` for the Lagrange basis on GL nodes."""
    x, _ = _gauss_legendre(m)
    leg = np.polynomial.legendre
    V = leg.legvander(x, m - 1)
    Vint = np.empty((m, m))
    for j in range(m):
        c = np.zeros(j + 1)
        c[j] = 1.0
        Vint[:, j] = leg.legval(x, leg.legint(c, lbnd=-1))
    return Vint @ np.linalg.inv(V)


def _panel_grid(t, npan, m):
    x, w = _gauss_legendre(m)
    h = t / npan
    starts = h * np.arange(npan)
    nodes = starts[:, None] + 0.5 * h * (x[None, :] + 1.0)
    weights = np.broadcast_to(0.5 * h * w, nodes.shape)
    return starts, h, nodes, weights


@dataclass(frozen=True)
class SpinKernel:
    """Frequency-resolved kernels for an array of frequencies, each shape (M, 3)."""

    omega: np.ndarray
    f: np.ndarray
    f_tilde: np.ndarray
    Y: np.ndarray

    @property
    def F(self) -> np.ndarray:
        f, g = self.f, self.f_tilde
        return np.stack([
            f[:, 1] * f[:, 2] + g[:, 1] * g[:, 2],
            -(f[:, 0] * f[:, 2] + g[:, 0] * g[:, 2]),
            f[:, 0] * f[:, 1] + g[:, 0] * g[:, 1],
        ], axis=1)


def _spin_kernels_fixed(svec, omega, t, npan, m, qmat):
    starts, h, nodes, weights = _panel_grid(t, npan, m)
    s = svec(nodes.ravel()).reshape(npan, m, 3)
    # e^{i w t'} s(t') on the grid, shape (M, P, m, 3)
    ph = np.exp(1j * np.multiply.outer(omega, nodes))
    sw = s * weights[:, :, None]
    A = np.einsum("wpk,pkj->wj", ph, sw)
    fc = np.exp(-1j * omega * t)[:, None] * A
    # G(t') = int_0^t' s(t'') e^{-i w t''} dt''
    g = np.conj(ph)[..., None] * s[None]
    within = 0.5 * h * np.einsum("kl,wplj->wpkj", qmat, g)
    full = np.einsum("wpkj,pk->wpj", g, weights)
    before = np.cumsum(full, axis=1) - full
    G = within + before[:, :, None, :]
    integrand = ph[..., None] * np.cross(s[None], G)
    Y = np.real(np.einsum("wpkj,pk->wj", integrand, weights))
    return fc.real, fc.imag, Y


def spin_kernels(model: GateModel, S: CouplingOperator, omega, t: float, q: QuadratureSpec = None,
                 nodes: int = 10, max_doublings: int = 8) -> SpinKernel:
    """``f = int_0^t s(t') cos w(t'-t) dt'``, ``ft`` (sine counterpart) and ``Y(w)``.

    ``Y(w) = int_0^t dt' int_0^t' dt'' s(t') x s(t'') cos w(t' - t'')``.
    Composite Gauss-Legendre in time with panels no wider than ``pi / w`` and
    ``pi / (2 * drive frequency)``; the panel count doubles until two
    successive results agree to ``q.rel_tol``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    q = q or QuadratureSpec()
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    zeros = np.zeros((len(omega), 3))
    if t == 0:
        return SpinKernel(omega, zeros, zeros.copy(), zeros.copy())
    svec = lambda ts: coupling_vectors(model, S, ts)
    qmat = _cumulative_matrix(nodes)
    f = np.empty((len(omega), 3))
    ft = np.empty_like(f)
    Y = np.empty_like(f)
    order = np.argsort(omega)
    for chunk in np.array_split(order, max(1, len(omega) // 64)):
        w = omega[chunk]
        fastest = max(float(np.max(np.abs(w))), 2.0 * model.max_frequency(), 1e-12)
        npan = max(1, int(np.ceil(t * fastest / np.pi)))
        prev = _spin_kernels_fixed(svec, w, t, npan, nodes, qmat)
        for _ in range(max_doublings):
            npan *= 2
            cur = _spin_kernels_fixed(svec, w, t, npan, nodes, qmat)
            diff = max(np.max(np.abs(a - b)) for a, b in zip(cur, prev))
            scale = max(np.max(np.abs(a)) for a in cur)
            prev = cur
            if diff <= q.rel_tol * scale + 1e-300:
                break
        else:
            raise QuadratureError("spin kernel time quadrature did not converge", prev, diff)
        f[chunk], ft[chunk], Y[chunk] = prev
    return SpinKernel(omega, f, ft, Y)


# --- bath-weighted mode sums -------------------------------------------------

@dataclass(frozen=True)
class MagnusIntegrals:
    """Mode sums entering the decoherence table.

    ``R`` symmetric (thermal-weighted), ``C`` antisymmetric (commutator part),
    ``Y`` thermal-weighted double-time kernel.
    """

    R: np.ndarray
    C: np.ndarray
    Y: np.ndarray

    @property
    def F(self) -> np.ndarray:
        R = self.R
        return np.array([R[1, 2], -R[0, 2], R[0, 1]])

    @property
    def kappa(self) -> np.ndarray:
        return self.Y - self.F

    def scaled(self, factor):
        return MagnusIntegrals(factor * self.R, factor * self.C, factor * self.Y)


def _time_integrals_fixed(model, S, bath, t, npan, m):
    starts, h, nodes, weights = _panel_grid(t, npan, m)
    x, wq = _gauss_legendre(m)
    tau = nodes.ravel()
    w = weights.ravel()
    s = coupling_vectors(model, S, tau)
    sw = s * w[:, None]
    # Correlations depend only on (panel offset, node, node); evaluate once.
    offs = np.arange(-(npan - 1), npan)
    local = 0.5 * h * (x[:, None] - x[None, :])
    uniq = offs[:, None, None] * h + local[None]
    cr_u, ks_u = bath.correlation(uniq)
    pidx = np.repeat(np.arange(npan), m)
    kidx = np.tile(np.arange(m), npan)
    dp = pidx[:, None] - pidx[None, :] + (npan - 1)
    cr = cr_u[dp, kidx[:, None], kidx[None, :]]
    ks = ks_u[dp, kidx[:, None], kidx[None, :]]
    R = sw.T @ cr @ sw
    C = -(sw.T @ ks @ sw)
    # Y: inner integral over [0, tau_a] = completed panels + partial panel.
    mask = pidx[None, :] < pidx[:, None]
    G = (cr * mask) @ sw
    start_a = starts[pidx]
    frac = tau - start_a
    inner_nodes = start_a[:, None] + 0.5 * frac[:, None] * (x[None, :] + 1.0)
    inner_w = 0.5 * frac[:, None] * wq[None, :]
    s_inner = coupling_vectors(model, S, inner_nodes.ravel()).reshape(len(tau), m, 3)
    cr_inner, _ = bath.correlation(tau[:, None] - inner_nodes)
    G += np.einsum("ak,akj->aj", inner_w * cr_inner, s_inner)
    Y = np.einsum("a,aj->j", w, np.cross(s, G))
    return MagnusIntegrals(R, C, Y)


def _max_abs(ints: MagnusIntegrals) -> float:
    return max(np.max(np.abs(ints.R)), np.max(np.abs(ints.C)), np.max(np.abs(ints.Y)))


def magnus_integrals_time(model: GateModel, S: CouplingOperator, bath: Bath, t: float,
                          q: QuadratureSpec = None, nodes: int = 10, max_halvings: int = 5) -> MagnusIntegrals:
    """Mode sums as double time integrals against the bath correlation functions.

    Exchanging the frequency and time integrations turns every mode sum into
    ``int int s_i(t') s_j(t'') C(t' - t'')``-type integrals, with ``C`` known in
    closed form. Panel width starts at ``1 / max(drive, bath)`` frequency; a
    lower-order rule on the same panels estimates the error and panels are
    halved until it meets ``q.rel_tol``.
    """
    q = q or QuadratureSpec()
    if t < 0:
        raise ValueError("t must be non-negative")
    zero = MagnusIntegrals(np.zeros((3, 3)), np.zeros((3, 3)), np.zeros(3))
    if t == 0:
        return zero
    scale = max(model.max_frequency(), bath.frequency_scale(), 1e-12)
    npan = max(1, int(np.ceil(t * scale)))
    for _ in range(max_halvings + 1):
        fine = _time_integrals_fixed(model, S, bath, t, npan, nodes)
        coarse = _time_integrals_fixed(model, S, bath, t, npan, nodes - 2)
        err = max(np.max(np.abs(fine.R - coarse.R)), np.max(np.abs(fine.C - coarse.C)),
                  np.max(np.abs(fine.Y - coarse.Y)))
        if err <= q.rel_tol * _max_abs(fine) + q.abs_tol:
            return fine
        npan *= 2
    raise QuadratureError("double time integrals did not converge", fine, err)


def magnus_integrals_frequency(model: GateModel, S: CouplingOperator, bath: Bath, t: float,
                               q: QuadratureSpec = None) -> MagnusIntegrals:
    """Mode sums evaluated frequency by frequency from ``spin_kernels``.

    For each quadrature node the kernels ``f``, ``ft`` and ``Y`` are computed
    once and all components are integrated together.
    """
    q = q or QuadratureSpec()
    iu = np.triu_indices(3)
    ia, ib = np.array([0, 0, 1]), np.array([1, 2, 2])

    def kernel(w, t_):
        sk = spin_kernels(model, S, w, t_, q)
        coth = thermal_factor(w, bath.temperature)
        f, g = sk.f, sk.f_tilde
        r = (f[:, iu[0]] * f[:, iu[1]] + g[:, iu[0]] * g[:, iu[1]]) * coth[:, None]
        c = f[:, ia] * g[:, ib] - g[:, ia] * f[:, ib]
        return np.concatenate([r, c, sk.Y * coth[:, None]], axis=1)

    if t == 0:
        total = np.zeros(12)
    else:
        total = np.asarray(mode_sum(bath, kernel, t, q))
    R = np.zeros((3, 3))
    R[iu] = total[:6]
    R = R + R.T - np.diag(np.diag(R))
    C = np.zeros((3, 3))
    C[ia, ib] = total[6:9]
    C = C - C.T
    return MagnusIntegrals(R, C, total[9:12])


# --- decoherence table -------------------------------------------------------

def decoherence_exponents(ints: MagnusIntegrals, signs=SIGNS) -> np.ndarray:
    """8x8 table ``D[x, x']`` from the mode sums.

    ``Re D = -1/2 (x - x').R.(x - x')`` and
    ``Im D = -(x - x').(Y - F) + sum_ij x'_i x_j C_ij + phi(x') - phi(x)``
    with ``phi(x) = sum_{i<j} x_i x_j C_ij``.
    """
    X = np.asarray(signs, dtype=float)
    delta = X[:, None, :] - X[None, :, :]
    re = -0.5 * np.einsum("abi,ij,abj->ab", delta, ints.R, delta)
    iu = np.triu_indices(3, 1)
    phi = np.einsum("ai,aj,ij->a", X, X, np.triu(ints.C, 1))
    cross = np.einsum("bi,aj,ij->ab", X, X, ints.C)
    im = -np.einsum("abi,i->ab", delta, ints.kappa) + cross + phi[None, :] - phi[:, None]
    D = re + 1j * im
    D[np.diag_indices(len(X))] = 0.0
    return D


@dataclass(frozen=True)
class MagnusDecoherenceTable:
    D: np.ndarray
    t: float
    integrals: MagnusIntegrals
    signs: np.ndarray = SIGNS

    def labels(self):
        return ["".join("p" if s > 0 else "m" for s in row) for row in self.signs]


def magnus_decoherence_table(model: GateModel, S: CouplingOperator, bath: Bath, t: float,
                             q: QuadratureSpec = None, method: str = "time") -> MagnusDecoherenceTable:
    """Decoherence exponents for all 64 ordered pairs of projector chains."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if method == "time":
        ints = magnus_integrals_time(model, S, bath, t, q)
    elif method == "frequency":
        ints = magnus_integrals_frequency(model, S, bath, t, q)
    else:
        raise ValueError(f"unknown method {method!r}")
    return MagnusDecoherenceTable(decoherence_exponents(ints), t, ints)


def magnus_channel(model: GateModel, S: CouplingOperator, bath: Bath, t: float,
                   q: QuadratureSpec = None, method: str = "time") -> DecoherenceMap:
    u = ideal_propagator(model, t)
    table = magnus_decoherence_table(model, S, bath, t, q, method)
    ops = np.einsum("ij,ajk->aik", u, projector_chains())
    return DecoherenceMap(ops, table.D, u, t, renormalize=True, info={"table": table})


def evolve_magnus(model: GateModel, S: CouplingOperator, bath: Bath, rho0, t: float,
                  q: QuadratureSpec = None, full_output: bool = False):
    """Reduced density matrix of the Magnus scheme.

    The 64-term sum is renormalised to unit trace when its trace drifts by
    more than 1e-12; with ``full_output`` the size of that correction and the
    decoherence table are returned alongside.
    """
    chan = magnus_channel(model, S, bath, t, q)
    rho = chan.apply(rho0)
    if not full_output:
        return rho
    return rho, {"trace_correction": chan.trace_defect(rho0), "table": chan.info["table"]}
