"""Automated GUI test generation for menu-driven business applications."""
__version__ = "0.1.0"
