"""Deterministic computation: dynamics, losses, bounds, graph metrics, experiments."""
