"""Equivariant Donaldson-Thomas theory of local curves: exact series computations."""

from .algebra import QSeries, RatFunc
from .partitions import Partition

__all__ = ["Partition", "QSeries", "RatFunc"]
