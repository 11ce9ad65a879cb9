"""Common form of the reduced dynamics produced by both approximation schemes.

Both schemes give ``rho(t) = sum_ab exp(D_ab) A_a rho0 A_b^dag`` for a small
set of operators ``A_a`` that resolve the ideal propagator,
``sum_a A_a = U_S(t)``. The deviation from coherent evolution is therefore
``sum_ab expm1(D_ab) A_a rho0 A_b^dag``, which keeps full relative precision
even when the decoherence exponents are tiny.
"""
from dataclasses import dataclass, field

import numpy as np

from .pauli import dagger


@dataclass(frozen=True)
class DecoherenceMap:
    ops: np.ndarray          # (K, 2, 2)
    D: np.ndarray            # (K, K) complex
    ideal: np.ndarray        # U_S(t)
    t: float
    renormalize: bool = False
    trace_tol: float = 1e-12
    info: dict = field(default_factory=dict, compare=False)

    def ideal_density(self, rho0):
        rho0 = np.asarray(rho0, dtype=complex)
        return self.ideal @ rho0 @ dagger(self.ideal)

    def raw_deviation(self, rho0):
        """``sum_ab expm1(D_ab) A_a rho0 A_b^dag`` (no trace correction); accepts stacks."""
        rho0 = np.asarray(rho0, dtype=complex)
        weights = np.expm1(self.D)
        left = np.einsum("aij,...jk->a...ik", self.ops, rho0)
        right = dagger(self.ops)
        # Fixed summation order for reproducibility.
        return np.einsum("ab,a...ik,bkl->...il", weights, left, right)

    def deviation(self, rho0):
        """``chi = rho_S - rho_C``, consistent with the returned density."""
        delta = self.raw_deviation(rho0)
        if not self.renormalize:
            return delta
        tr = np.trace(delta, axis1=-2, axis2=-1)
        if np.all(np.abs(tr) <= self.trace_tol):
            return delta
        rho_c = self.ideal_density(rho0)
        tr = tr[..., None, None]
        return (delta - tr * rho_c) / (1.0 + tr)

    def apply(self, rho0):
        return self.ideal_density(rho0) + self.deviation(rho0)

    def trace_defect(self, rho0) -> float:
        """Trace of the unnormalised deviation (zero for an exactly trace-preserving map)."""
        return complex(np.trace(self.raw_deviation(rho0)))
