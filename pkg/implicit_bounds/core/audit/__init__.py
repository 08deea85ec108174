"""Run bundle writing and validation."""
