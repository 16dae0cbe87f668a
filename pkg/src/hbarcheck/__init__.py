"""Decide whether a phase-space function is a quantum state at a given hbar."""

__version__ = "0.1.0"
