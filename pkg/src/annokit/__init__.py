"""annokit: a schema-driven annotation platform with suggestion back-ends."""

__version__ = "0.1.0"
