"""Quantum-circuit-driven music generation: a hyper-die voice synthesiser,
a cube quantum-walk sequencer and classical Markov-chain melodies."""

from .qsim import Circuit, Counts, Gate, LocalBackend, StateVector, run_circuit

__all__ = ["Circuit", "Counts", "Gate", "LocalBackend", "StateVector", "run_circuit"]
__version__ = "0.1.0"
