"""Borcherds products on Enriques period domains and the identities they satisfy."""

from __future__ import annotations

__version__ = "0.1.0"
