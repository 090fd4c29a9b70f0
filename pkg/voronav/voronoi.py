"""Distance field and skeleton of the free mask."""

import typing

import numpy as np
from scipy import ndimage
from skimage import morphology

from .exceptions import EmptyFreeSpace


class DistanceField(typing.NamedTuple):
    """A grid of distances in meters; ``inf`` marks cells with no finite value."""
    values: np.ndarray
    resolution: float
    origin: tuple

    def at(self, cell):
        return float(self.values[cell[0], cell[1]])


class SkeletonMask(typing.NamedTuple):
    """A one-pixel-wide, 8-connected skeleton of a free mask."""
    mask: np.ndarray
    resolution: float
    origin: tuple


def esdf(free):
    """Exact Euclidean distance from each free cell center to the nearest non-free cell center.

    Non-free cells hold 0. If the mask has no non-free cell at all every
    value is ``inf``.

    Raises:
        EmptyFreeSpace: If ``free`` has no free cell.
    """
    mask = np.asarray(free.free, dtype=bool)
    if not mask.any():
        raise EmptyFreeSpace('free mask is empty')
    if mask.all():
        values = np.full(mask.shape, np.inf)
    else:
        values = ndimage.distance_transform_edt(mask) * free.resolution
    return DistanceField(values=values, resolution=free.resolution, origin=free.origin)


def skeletonize(free):
    """Zhang-Suen thinning of the free mask.

    Raises:
        EmptyFreeSpace: If ``free`` has no free cell.
    """
    mask = np.asarray(free.free, dtype=bool)
    if not mask.any():
        raise EmptyFreeSpace('free mask is empty')
    skeleton = morphology.skeletonize(mask) & mask
    return SkeletonMask(mask=skeleton, resolution=free.resolution, origin=free.origin)
