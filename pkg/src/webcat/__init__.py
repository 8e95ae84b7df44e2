"""Exact evaluation and classification tools for sl2, gl2 and so3 web categories."""
from __future__ import annotations

__version__ = "0.1.0"
