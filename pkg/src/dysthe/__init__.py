"""Pseudospectral solvers, symmetry checks and dispersive estimates for Dysthe-type equations."""
