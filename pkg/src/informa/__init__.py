"""Informa - data informativity checks and certified controller synthesis."""

__version__ = "0.1.0"
