"""Datasets, training, sample complexity and report sections."""
