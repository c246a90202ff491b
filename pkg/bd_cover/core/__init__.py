"""Core arithmetic: local fields, symbols, quadratic forms, covers and packet data."""
