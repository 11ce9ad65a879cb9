"""Gate models, ideal propagators and the interaction-picture coupling vector."""
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .pauli import (
    PAULIS, SX, SY, SZ, I2, as_operator, bloch_vector, dagger, herm_eigen,
    herm_exp, is_density, is_hermitian, pauli_decompose, pure_state,
)


@dataclass(frozen=True)
class Adiabatic:
    """Idling qubit ``H_S = a sigma_z``; ``a`` is half the energy gap."""

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")

    def hamiltonian(self, t: float) -> np.ndarray:
        return self.a * SZ

    def max_frequency(self) -> float:
        return 2.0 * self.a


@dataclass(frozen=True)
class RotatingWave:
    """Resonant rotating-wave gate.

    ``H_S(t) = a sigma_z + c (sigma_x cos 2at + sigma_y sin 2at)``; applying it
    for ``t = pi / 2a`` with ``c = a`` acts as a phase-plus-NOT gate.
    """

    a: float
    c: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if self.c < 0:
            raise ValueError("c must be non-negative")

    def hamiltonian(self, t: float) -> np.ndarray:
        w = 2.0 * self.a * t
        return self.a * SZ + self.c * (np.cos(w) * SX + np.sin(w) * SY)

    def max_frequency(self) -> float:
        return 2.0 * (self.a + self.c)


@dataclass(frozen=True)
class Custom:
    """Arbitrary drive given by a sampler ``t -> H_S(t)`` and a step size.

    The ideal propagator is the ordered product of midpoint exponentials.
    ``bandwidth`` optionally bounds the frequencies present in the
    interaction-picture coupling; when omitted it is estimated from the
    sampled Hamiltonian norm.
    """

    sampler: Callable[[float], np.ndarray]
    step: float
    bandwidth: Union[float, None] = None
    horizon: float = 20.0

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")

    def hamiltonian(self, t: float) -> np.ndarray:
        h = as_operator(self.sampler(t))
        if not is_hermitian(h):
            raise ValueError(f"sampler returned a non-Hermitian operator at t={t}")
        return h

    def max_frequency(self) -> float:
        if self.bandwidth is not None:
            return float(self.bandwidth)
        ts = np.linspace(0.0, self.horizon, 201)
        return 2.0 * max(np.linalg.norm(np.real(pauli_decompose(self.hamiltonian(t)).v)) for t in ts)


GateModel = Union[Adiabatic, RotatingWave, Custom]


@dataclass(frozen=True)
class CouplingOperator:
    """Traceless Hermitian system operator ``S`` of ``H_SB = S sum_k X_k``."""

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = as_operator(self.matrix)
        if not is_hermitian(m):
            raise ValueError("coupling operator must be Hermitian")
        if abs(np.trace(m)) > 1e-12:
            raise ValueError("coupling operator must be traceless")
        evals, evecs = herm_eigen(m)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eigenvalues", evals)
        object.__setattr__(self, "eigenvectors", evecs)

    @property
    def vector(self) -> np.ndarray:
        return bloch_vector(self.matrix)

    def projectors(self) -> np.ndarray:
        """Eigenprojectors ordered (lambda_plus, lambda_minus)."""
        v = self.eigenvectors
        return np.stack([np.outer(v[:, k], v[:, k].conj()) for k in range(2)])

    @classmethod
    def named(cls, name: str) -> "CouplingOperator":
        table = {"sx": SX, "sy": SY, "sz": SZ}
        try:
            return cls(table[name.lower()])
        except KeyError:
            raise ValueError(f"unknown coupling {name!r}; expected one of {sorted(table)}") from None


SIGMA_Z_COUPLING = CouplingOperator(SZ)


def initial_state(rho0=None, theta: float = None, phi: float = 0.0) -> np.ndarray:
    """Validate a density matrix or build a pure state from Bloch angles."""
    if rho0 is None:
        if theta is None:
            raise ValueError("give either a density matrix or Bloch angles")
        return pure_state(theta, phi)
    rho0 = as_operator(rho0)
    if not is_density(rho0):
        raise ValueError("initial state is not a valid density matrix")
    return rho0


def _custom_propagators(model: Custom, times) -> np.ndarray:
    """Ordered midpoint products on the grid ``k * step`` plus one partial step to each time."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if len(times) == 0:
        return np.empty((0, 2, 2), dtype=complex)
    kmax = int(np.floor(times.max() / model.step + 1e-9))
    grid = [I2.copy()]
    for k in range(kmax):
        grid.append(herm_exp(model.hamiltonian((k + 0.5) * model.step), model.step) @ grid[-1])
    out = np.empty((len(times), 2, 2), dtype=complex)
    for i, t in enumerate(times):
        k = min(int(np.floor(t / model.step + 1e-9)), kmax)
        rest = t - k * model.step
        u = grid[k]
        if rest > 1e-12 * model.step:
            u = herm_exp(model.hamiltonian(k * model.step + 0.5 * rest), rest) @ u
        out[i] = u
    return out


def ideal_propagator(model: GateModel, t: float) -> np.ndarray:
    """Noiseless evolution operator ``U_S(t)``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if isinstance(model, Adiabatic):
        return herm_exp(model.a * SZ, t)
    if isinstance(model, RotatingWave):
        return herm_exp(model.a * SZ, t) @ herm_exp(model.c * SX, t)
    if isinstance(model, Custom):
        return _custom_propagators(model, [t])[0]
    raise TypeError(f"unsupported gate model {type(model).__name__}")


def _rotation_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    z, o = np.zeros_like(c), np.ones_like(c)
    return np.array([[c, -s, z], [s, c, z], [z, z, o]])


def _rotation_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    z, o = np.zeros_like(c), np.ones_like(c)
    return np.array([[o, z, z], [z, c, -s], [z, s, c]])


def coupling_vectors(model: GateModel, S: CouplingOperator, times) -> np.ndarray:
    """Pauli vectors of ``U_S^dag(t) S U_S(t)`` for an array of times, shape (len(times), 3).

    Conjugating by ``exp(-i theta n.sigma)`` rotates a Pauli vector by
    ``-2 theta`` about ``n``, which gives closed forms for the built-in models.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    s0 = S.vector
    if isinstance(model, Adiabatic):
        rz = _rotation_z(-2.0 * model.a * times)
        return np.einsum("ijn,j->ni", rz, s0)
    if isinstance(model, RotatingWave):
        rz = _rotation_z(-2.0 * model.a * times)
        rx = _rotation_x(-2.0 * model.c * times)
        return np.einsum("ijn,jkn,k->ni", rx, rz, s0)
    us = _custom_propagators(model, times)
    return np.stack([bloch_vector(dagger(u) @ S.matrix @ u) for u in us]) if len(us) else np.empty((0, 3))


def interaction_coupling_vector(model: GateModel, S: CouplingOperator, t: float) -> np.ndarray:
    """Real 3-vector ``s(t) = Tr[U_S^dag S U_S sigma] / 2``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return coupling_vectors(model, S, [t])[0]


def ideal_density(model: GateModel, rho0, t: float) -> np.ndarray:
    """Coherent evolution ``U_S rho0 U_S^dag``."""
    u = ideal_propagator(model, t)
    return u @ as_operator(rho0) @ dagger(u)


def commutes_with(model: GateModel, S: CouplingOperator, times=None, tol: float = 1e-12) -> bool:
    if isinstance(model, Adiabatic):
        h = model.hamiltonian(0.0)
        return bool(np.max(np.abs(h @ S.matrix - S.matrix @ h)) <= tol)
    if times is None:
        times = np.linspace(0.0, 10.0, 41)
    for t in times:
        h = model.hamiltonian(t)
        if np.max(np.abs(h @ S.matrix - S.matrix @ h)) > tol:
            return False
    return True
