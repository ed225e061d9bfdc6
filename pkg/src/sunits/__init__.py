"""Presentations of S-unit groups via actions on Bruhat-Tits buildings."""

__version__ = "0.1.0"
