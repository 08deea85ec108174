"""Toy rigid-contact dynamics: explicit map, implicit prediction, violation."""
