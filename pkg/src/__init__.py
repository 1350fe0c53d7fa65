# Superkmer Counter
# Multi-threaded exact k-mer counting with signature binning and LPT partitioning

__version__ = "1.0.0"
