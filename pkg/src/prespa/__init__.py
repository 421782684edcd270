"""Simulation and analysis of continuous parity-recovery error correction for a binomial cavity code."""

__version__ = "0.1.0"
