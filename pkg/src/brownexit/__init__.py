"""brownexit - bivariate distributions for pairs of unit vectors generated by Brownian exits."""

__version__ = "0.1.0"
