"""Implicit-loss generalization bounds on a rigid-contact toy model.

Enables python -m implicit_bounds.cli.main from repo root.
"""
