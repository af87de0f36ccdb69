"""Convex cone geometry of 2-jets and grid-based subharmonicity checks."""

__version__ = "0.1.0"
