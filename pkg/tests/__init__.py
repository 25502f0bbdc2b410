"""Tests with pytest."""
