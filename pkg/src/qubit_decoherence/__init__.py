"""Decoherence of a driven qubit coupled to a bosonic bath.

Two approximation schemes are provided: a short-time factorisation of the
propagator (``evolve_short_time``) and a second-order Magnus expansion in
the coupling (``evolve_magnus``). Both return the reduced density matrix;
``measures`` quantifies the departure from coherent evolution and
``oracles`` holds exact reference solutions.
"""
from .bath import BathSpectrum, DiscreteBath, QuadratureError, QuadratureSpec
from .channel import DecoherenceMap
from .magnus import evolve_magnus, magnus_channel, magnus_decoherence_table
from .measures import DeviationReport, deviation, lambda_norm, maximize_over_initial_states
from .models import (
    SIGMA_Z_COUPLING,
    Adiabatic,
    CouplingOperator,
    Custom,
    RotatingWave,
    ideal_density,
    ideal_propagator,
    initial_state,
)
from .oracles import ConvergenceError, adiabatic_exact, few_mode_evolution, few_mode_exact
from .short_time import evolve_short_time, short_time_channel, short_time_decoherence

__version__ = "0.1.0"
