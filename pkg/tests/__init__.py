"""Tests for the cumulative entropy toolkit."""
