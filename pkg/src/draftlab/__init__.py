"""Team-design analytics and draft assistant for 5v5 champion-select games."""

__version__ = "0.1.0"
