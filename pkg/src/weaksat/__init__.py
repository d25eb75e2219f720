"""Saturation-based weak bisimulation for Kleisli-category transition systems."""
__version__ = "0.1.0"
