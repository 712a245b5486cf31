"""Interface layer for the soapfilm command line."""
