"""reefopt: Coral Reefs Optimization with Substrate Layers and its benchmark problems."""

__version__ = "1.0.0"
