"""Interface layer unit tests."""
