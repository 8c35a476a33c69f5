"""Exact small-scale simulator for feedback-assisted communication over a
noisy random-unitary qubit channel paired with a noiseless one."""

__version__ = "0.1.0"
