"""Closed-form arithmetic for 2x2 complex operators.

Operators are plain ``(2, 2)`` complex numpy arrays. Hermitian, unitary and
density "tags" are checked by the ``is_*`` predicates rather than carried by a
wrapper type.
"""
from dataclasses import dataclass

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SX, SY, SZ])

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12
DENSITY_EIG_TOL = 1e-10


@dataclass(frozen=True)
class PauliForm:
    """Coefficients of ``c0 * I + v . sigma``."""

    c0: complex
    v: np.ndarray

    def matrix(self) -> np.ndarray:
        return self.c0 * I2 + np.tensordot(self.v, PAULIS, axes=1)

    @property
    def is_real(self) -> bool:
        return abs(np.imag(self.c0)) <= HERMITIAN_TOL and np.all(np.abs(np.imag(self.v)) <= HERMITIAN_TOL)


def as_operator(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {m.shape}")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_operator(m)
    return bool(np.max(np.abs(m - dagger(m))) <= tol)


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = as_operator(u)
    return bool(np.max(np.abs(dagger(u) @ u - I2)) <= tol)


def is_density(rho, tol: float = HERMITIAN_TOL, eig_tol: float = DENSITY_EIG_TOL) -> bool:
    rho = as_operator(rho)
    if not is_hermitian(rho, tol):
        return False
    if abs(np.trace(rho) - 1.0) > tol:
        return False
    evals, _ = herm_eigen(rho)
    return bool(evals[-1] >= -eig_tol)


def pauli_decompose(m) -> PauliForm:
    """Return ``(c0, v)`` with ``c0 = Tr[M]/2`` and ``v_j = Tr[M sigma_j]/2``."""
    m = as_operator(m)
    c0 = 0.5 * (m[0, 0] + m[1, 1])
    v = 0.5 * np.array([
        m[0, 1] + m[1, 0],
        1j * (m[0, 1] - m[1, 0]),
        m[0, 0] - m[1, 1],
    ])
    return PauliForm(c0, v)


def pauli_reconstruct(c0, v) -> np.ndarray:
    return PauliForm(c0, np.asarray(v, dtype=complex)).matrix()


def bloch_vector(m) -> np.ndarray:
    """Real Pauli vector ``Tr[M sigma]/2`` of a Hermitian operator."""
    return np.real(pauli_decompose(m).v)


def herm_exp(h, t: float) -> np.ndarray:
    """``exp(-i H t)`` for Hermitian ``H`` via the SU(2) closed form."""
    form = pauli_decompose(h)
    c0 = float(np.real(form.c0))
    v = np.real(form.v)
    norm = float(np.linalg.norm(v))
    phase = np.exp(-1j * c0 * t)
    if norm == 0.0:
        return phase * I2
    n = v / norm
    return phase * (np.cos(norm * t) * I2 - 1j * np.sin(norm * t) * np.tensordot(n, PAULIS, axes=1))


def herm_eigen(m):
    """Eigen-decomposition of a Hermitian 2x2 operator.

    Returns
    -------
    evals : ndarray, shape (2,)
        ``c0 + |v|`` and ``c0 - |v|`` (descending).
    evecs : ndarray, shape (2, 2)
        Orthonormal eigenvectors as columns.
    """
    form = pauli_decompose(m)
    c0 = float(np.real(form.c0))
    v = np.real(form.v)
    norm = float(np.linalg.norm(v))
    evals = np.array([c0 + norm, c0 - norm])
    if norm == 0.0:
        return evals, I2.copy()
    x, y, z = v / norm
    # Spinor for direction n; pick the chart away from the south pole.
    if z >= 0:
        up = np.array([1 + z, x + 1j * y]) / np.sqrt(2 * (1 + z))
        down = np.array([-(x - 1j * y), 1 + z]) / np.sqrt(2 * (1 + z))
    else:
        up = np.array([x - 1j * y, 1 - z]) / np.sqrt(2 * (1 - z))
        down = np.array([1 - z, -(x + 1j * y)]) / np.sqrt(2 * (1 - z))
    return evals, np.column_stack([up, down])


def unitary_eigen(u):
    """Eigenphases in (-pi, pi] and eigenvectors of a 2x2 unitary.

    A unitary is normal, so its Hermitian and anti-Hermitian parts share
    eigenvectors; the eigenbasis is taken from whichever part is larger.
    """
    u = as_operator(u)
    herm = 0.5 * (u + dagger(u))
    anti = -0.5j * (u - dagger(u))
    fh, fa = pauli_decompose(herm), pauli_decompose(anti)
    use = herm if np.linalg.norm(np.real(fh.v)) >= np.linalg.norm(np.real(fa.v)) else anti
    _, vecs = herm_eigen(use)
    evals = np.array([vecs[:, k].conj() @ u @ vecs[:, k] for k in range(2)])
    return np.angle(evals), vecs


def unitary_sqrt(u, branch=(0, 0)) -> np.ndarray:
    """Square root ``W`` of a 2x2 unitary with ``W @ W = U``.

    Each eigenphase ``phi`` in (-pi, pi] is halved into (-pi/2, pi/2]; a
    nonzero entry of ``branch`` shifts the corresponding half-phase by pi.
    A degenerate ``U = exp(i phi) I`` maps to ``exp(i phi / 2) I``.
    """
    u = as_operator(u)
    phases, vecs = unitary_eigen(u)
    b = np.asarray(branch, dtype=int) % 2
    half = 0.5 * phases + np.pi * b
    if abs(np.exp(1j * phases[0]) - np.exp(1j * phases[1])) < 1e-14 and b[0] == b[1]:
        return np.exp(1j * half[0]) * I2
    return (vecs * np.exp(1j * half)) @ dagger(vecs)


def ket_bra(a, b) -> np.ndarray:
    return np.outer(a, np.conj(b))


def pure_state(theta: float, phi: float) -> np.ndarray:
    """Density matrix of the Bloch-sphere pure state ``(theta, phi)``; broadcasts over arrays."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    psi = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)
    return psi[..., :, None] * np.conj(psi[..., None, :])


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    c0 = rng.normal()
    v = rng.normal(size=3)
    return scale * pauli_reconstruct(c0, v)
