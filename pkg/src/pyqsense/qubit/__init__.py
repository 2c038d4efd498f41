"""Exact two-level-system states and propagators, in the rotating frame."""
