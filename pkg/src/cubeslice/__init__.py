"""Exact intersection counts of linear subspaces with the hypercube."""

from .intersect import AffineMap, IntersectionReport, count_intersection, linearize
from .linalg import RatMatrix

__all__ = ["AffineMap", "IntersectionReport", "RatMatrix", "count_intersection", "linearize"]
__version__ = "0.1.0"
