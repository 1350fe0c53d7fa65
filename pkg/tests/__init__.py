"""Test suite for skc - Superkmer Counter."""
