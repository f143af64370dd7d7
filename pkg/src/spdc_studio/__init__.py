"""Simulation and analysis toolkit for domain-engineered SPDC
polarization-entanglement sources."""

__version__ = "0.1.0"
