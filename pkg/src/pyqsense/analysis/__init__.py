"""Closed-form and spectral analysis: envelopes, phase variance, sensitivity, and spectrum reconstruction."""
