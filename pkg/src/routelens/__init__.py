"""Route-map and ACL analysis, synthesis, and insertion tooling."""

__version__ = "0.1.0"
