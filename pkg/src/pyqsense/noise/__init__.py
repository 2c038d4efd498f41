"""Detuning signal and noise models, trajectory sampling, and power spectral densities."""
