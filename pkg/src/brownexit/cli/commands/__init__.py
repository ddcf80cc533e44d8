"""Commands, loaded lazily by name; every module exports ``cli``."""
