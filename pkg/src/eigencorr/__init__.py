"""Eigenfunction correlations in chaotic Hamiltonians with sparse perturbations."""

__version__ = "0.1.0"
