"""Pulse sequences: data model, builders, text language, and sensitivity/filter functions."""
