"""Lipschitz constants, loss suprema and the generalization bound."""
