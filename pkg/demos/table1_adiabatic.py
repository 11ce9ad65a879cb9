"""Adiabatic gate under pure dephasing: measure per bath exponent n.

For the adiabatic model the short-time scheme is exact, so both columns
should agree with the closed-form solution. The ratios to the n=1 row do
not depend on the initial state.
"""
from qubit_decoherence.bath import BathSpectrum
from qubit_decoherence.magnus import magnus_channel
from qubit_decoherence.measures import lambda_norm
from qubit_decoherence.models import Adiabatic, CouplingOperator, ideal_density
from qubit_decoherence.oracles import adiabatic_exact
from qubit_decoherence.pauli import pure_state
from qubit_decoherence.scenarios import TABLE1_THETA
from qubit_decoherence.short_time import short_time_channel

S = CouplingOperator.named("sz")
model = Adiabatic(1.0)
rho0 = pure_state(TABLE1_THETA, 0.0)

print(f"{'n':>2} {'short-time':>13} {'magnus':>13} {'exact':>13} {'ratio':>9}")
base = None
for n in (1, 2, 3):
    bath = BathSpectrum(1e-6, n, 30.0)
    st = lambda_norm(short_time_channel(model, S, bath, 1.0).deviation(rho0))
    mg = lambda_norm(magnus_channel(model, S, bath, 1.0).deviation(rho0))
    ex = lambda_norm(adiabatic_exact(bath, S, rho0, 1.0, model) - ideal_density(model, rho0, 1.0))
    base = base or st
    print(f"{n:>2} {st:13.6e} {mg:13.6e} {ex:13.6e} {st / base:9.3f}")
