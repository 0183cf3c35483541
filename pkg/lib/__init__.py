"""mmfbm-toolkit: multi-mixed fractional Brownian motion and Ornstein-Uhlenbeck processes."""

__version__ = "0.1.0"
