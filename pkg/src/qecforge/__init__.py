"""Benchmarking toolkit for quantum error correction: codes, compilation, noise, simulation and decoding."""

__version__ = "0.1.0"
