"""Error of each scheme against explicit three-mode propagation.

The short-time error should shrink like t^3 at fixed coupling and the
Magnus error like |g|^4, i.e. quadratically in |g|^2.
"""
import numpy as np

from qubit_decoherence.bath import DiscreteBath
from qubit_decoherence.magnus import magnus_channel
from qubit_decoherence.models import CouplingOperator, RotatingWave
from qubit_decoherence.oracles import few_mode_evolution
from qubit_decoherence.pauli import pure_state
from qubit_decoherence.short_time import short_time_channel

S = CouplingOperator.named("sz")
model = RotatingWave(1.0, 1.0)
rho0 = pure_state(1.1, 0.4)


def bath(g2):
    return DiscreteBath(((0.7, g2), (1.0, g2), (1.6, g2)), fock_cutoff=3)


def error(channel, g2, t):
    exact = few_mode_evolution(bath(g2), model, S, rho0, t, atol=0, rtol=1e-10).deviation
    return np.max(np.abs(channel(model, S, bath(g2), t).deviation(rho0) - exact))


ts = np.array([0.05, 0.1, 0.2, 0.4])
et = [error(short_time_channel, 1e-6, t) for t in ts]
print("short-time error vs t:", ", ".join(f"{e:.2e}" for e in et))
print("  log-log slope:", round(np.polyfit(np.log(ts), np.log(et), 1)[0], 3))

g2s = np.array([1e-7, 1e-6, 1e-5])
eg = [error(magnus_channel, g2, 0.5) for g2 in g2s]
print("magnus error vs |g|^2:", ", ".join(f"{e:.2e}" for e in eg))
print("  log-log slope:", round(np.polyfit(np.log(g2s), np.log(eg), 1)[0], 3))
