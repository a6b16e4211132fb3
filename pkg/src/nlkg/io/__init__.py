"""Run configuration loading, trajectory files and CSV output."""
