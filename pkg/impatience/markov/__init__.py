"""Closed-form and numerically computed Markov quantities: the "knowledge" information feed."""
