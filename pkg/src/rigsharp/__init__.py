"""Random intersection graphs, their coupling with G(n, p), and sharp-threshold experiments."""
__version__ = "0.1.0"
