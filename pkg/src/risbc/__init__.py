"""Spectral efficiency of a RIS-aided MIMO broadcast channel with a rank-one
BS-RIS link: exact and high-SNR ZF/DPC expressions, phase-shift strategies,
analytic bounds, and a reproducible Monte Carlo sweep harness."""

__version__ = "0.1.0"
