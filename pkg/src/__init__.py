"""Pulse Error Budget - finite pulses with axis errors."""
