"""Unit tests for soapfilm."""
