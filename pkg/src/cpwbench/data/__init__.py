"""Bundled data files (reference layout fixture)."""
