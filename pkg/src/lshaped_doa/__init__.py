"""2-D DOA estimation with L-shaped nested arrays via a co-array tensor model."""

__version__ = "0.1.0"
