"""Curvature algebra laboratory for Riemannian four-manifolds."""

__version__ = "0.1.0"
