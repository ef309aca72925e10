"""Random sparse expander matrices: tail bounds, phase transitions and recovery."""

__version__ = "0.1.0"
