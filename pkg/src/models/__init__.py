"""Pulse shapes, error functionals, design and simulation."""
