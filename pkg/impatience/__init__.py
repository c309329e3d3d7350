"""Dual-queue reneging and jockeying: information feeds, simulation and asymptotic checks."""

__version__ = "0.1.0"
