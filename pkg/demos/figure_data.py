"""Time traces for the driven (rotating-wave) gate.

Prints the |+> population deviation from both schemes and shows how their
disagreement grows with time, followed by the band structure of the Magnus
decoherence exponents at t = 10.
"""
import numpy as np

from qubit_decoherence.bath import BathSpectrum
from qubit_decoherence.magnus import magnus_channel, magnus_decoherence_table
from qubit_decoherence.models import CouplingOperator, RotatingWave
from qubit_decoherence.pauli import pure_state
from qubit_decoherence.short_time import short_time_channel

S = CouplingOperator.named("sz")
bath = BathSpectrum(1e-6, 1, 30.0)
model = RotatingWave(1.0, 1.0)
plus = pure_state(0.0, 0.0)

print(f"{'t':>5} {'short-time':>13} {'magnus':>13}")
for t in np.arange(0.5, 6.01, 0.5):
    st = short_time_channel(model, S, bath, t).deviation(plus)[0, 0].real
    mg = magnus_channel(model, S, bath, t).deviation(plus)[0, 0].real
    print(f"{t:5.1f} {st:13.5e} {mg:13.5e}")

D = magnus_decoherence_table(model, S, bath, 10.0).D.real
values = np.unique(np.round(D[np.triu_indices(8, 1)], 10))
print("\ndistinct Re D values at t = 10:", ", ".join(f"{v:.3e}" for v in values))
