"""Shared test configuration.

Nothing lives here beyond making the tests directory importable so the
oracle module can be shared across test files.
"""
