"""Command line tools for PyQSense."""
