"""flatfiber: exact-arithmetic toolkit for fibered crystallographic groups."""

__version__ = "0.1.0"

SCHEMA_TAG = "flatfiber/1"
