"""Acceptance harness for Hadamark."""
