"""Shared utilities across informa modules."""

from .config import Config

__all__ = ["Config"]
