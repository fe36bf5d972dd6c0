"""Read-only forensic extraction toolkit for Android cloud app storage."""

__version__ = "0.1.0"
