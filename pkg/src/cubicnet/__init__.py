"""Spectral networks of polynomial cubic differentials."""
