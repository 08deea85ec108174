"""Graph-distance oracle and the certificates built on it."""
