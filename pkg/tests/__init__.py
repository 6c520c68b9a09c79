"""Test suite for the OverHear toolkit."""
