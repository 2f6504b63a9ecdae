"""Network-wide gain of memory-assisted source coding on random graphs."""

__version__ = "0.1.0"
