"""Synthetic evidence generation for round-trip verification."""
