"""Test package for soapfilm."""
