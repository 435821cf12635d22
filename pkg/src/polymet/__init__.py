"""Leibman polynomial sequences, ergodic averages of unitary actions and
convergence instrumentation."""

__version__ = "0.1.0"
