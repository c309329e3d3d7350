"""Core utilities such as configuration, errors, rates, patience and seeded randomness."""
