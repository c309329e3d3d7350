"""Discrete-event simulation of the dual-queue system with pluggable information feeds."""
