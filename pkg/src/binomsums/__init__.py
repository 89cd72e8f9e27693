"""High-precision verification of central-binomial and odd-harmonic series identities."""

__version__ = "0.1.0"
