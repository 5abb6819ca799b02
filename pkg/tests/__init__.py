"""Tests for quasilie."""
