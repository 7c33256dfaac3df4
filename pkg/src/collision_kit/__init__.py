"""collision-kit: Size-preserving MD5 collisions, address-conditioned delivery and their detection."""

__version__ = "0.1.0"
