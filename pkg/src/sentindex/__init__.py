"""News-sentiment index construction and backtesting engine."""

__version__ = "0.1.0"
