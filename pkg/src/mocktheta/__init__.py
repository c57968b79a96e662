"""Mock theta functions, theta building blocks and N=3 characters."""
__version__ = "0.1.0"
