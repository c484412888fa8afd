"""Pulse files, matrix files and built-in system models."""
