"""Agenda-setting and framing analysis for news corpora."""

__version__ = "0.1.0"
