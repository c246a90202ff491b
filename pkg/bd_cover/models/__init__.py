"""Output schemas."""
