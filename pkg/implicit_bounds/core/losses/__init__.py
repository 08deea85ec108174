"""Explicit, naive-implicit and violation-implicit losses."""
