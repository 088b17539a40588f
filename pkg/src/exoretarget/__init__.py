"""Exoskeleton-to-humanoid motion retargeting toolkit."""
__version__ = "0.1.0"
