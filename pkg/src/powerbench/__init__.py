"""powerbench: a simulated distributed battery-measurement testbed."""

__version__ = "0.1.0"
