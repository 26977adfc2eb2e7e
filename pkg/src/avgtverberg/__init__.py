"""Average-value Tverberg partitions via finite Fourier analysis."""

__version__ = "0.1.0"
