"""Statevector simulator and a two-point quantum least-squares SVM pipeline."""

from .qcore import Circuit, Counts, GateApplication, NoiseModel, StateVector, run_exact, run_noisy
from .pipeline import RunConfig, run

__all__ = [
    "Circuit",
    "Counts",
    "GateApplication",
    "NoiseModel",
    "RunConfig",
    "StateVector",
    "run",
    "run_exact",
    "run_noisy",
]

__version__ = "0.1.0"
