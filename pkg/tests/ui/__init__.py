"""Tests for UI module."""
