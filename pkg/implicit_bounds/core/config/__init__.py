"""Experiment configuration loading and validation."""
