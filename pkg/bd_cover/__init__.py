"""bd-cover - exact arithmetic for Brylinski-Deligne covers of Sp(2n) over p-adic fields."""

__version__ = "0.1.0"
