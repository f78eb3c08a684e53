"""Exception types raised across diskgeo."""

from __future__ import annotations


class DiskGeoError(Exception):
    """Base class for all diskgeo errors."""


class NonFiniteDerived(DiskGeoError):
    """A derived radial quantity of a weight is NaN or infinite on the grid."""


class NotRadiusFunction(DiskGeoError):
    """tau fails strict positivity on (0, r_max]."""


class NotClassW(DiskGeoError):
    """The operation needs a weight of class W and got a proxy weight."""


class OutsideTruncation(DiskGeoError):
    """A point lies beyond the truncation radius r_max."""


class MeshTooLarge(DiskGeoError):
    """Mesh node count would exceed the configured cap."""


class HypothesisViolated(DiskGeoError):
    """An input violates the hypothesis of the statement being checked."""


class DegenerateBox(DiskGeoError):
    """A Carleson box is numerically empty."""


class PairOutOfRange(DiskGeoError):
    """A (z, w) pair does not satisfy |z - w| <= (delta/2) tau(z)."""
