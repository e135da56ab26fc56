"""Network SEIR simulation of digital contact tracing and testing strategies."""

__version__ = "0.1.0"
