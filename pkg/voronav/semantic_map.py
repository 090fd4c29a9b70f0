"""The layered semantic map built from accumulated observations."""

import copy
import logging
import os
import typing
from dataclasses import dataclass, field

import numpy as np
from PIL import Image
from scipy import ndimage

from . import constants as cn
from .exceptions import OutOfBounds
from .gridworld import world_to_cell


_logger = logging.getLogger(__name__)

_CLOSING = np.ones((3, 3), dtype=bool)
_EIGHT = np.ones((3, 3), dtype=bool)
_FOUR = ndimage.generate_binary_structure(2, 1)
# enclosed unknown pockets smaller than this many cells are filled
MAX_POCKET_CELLS = 9


@dataclass(eq=False)
class SemanticMap:
    """A (K+2)-channel M x M grid: obstacle, explored and one mask per category.

    Single writer per episode. Hand other threads a :meth:`snapshot`.

    Attributes:
        obstacle (numpy.ndarray): Boolean obstacle channel.
        explored (numpy.ndarray): Boolean explored channel.
        categories (numpy.ndarray): Boolean array of shape (K, M, M); channel
            ``k - 1`` holds category ``k``.
        resolution (float): Meters per cell.
        origin (tuple): World coordinates of the center of cell (0, 0).
        labels (dict): Category id to name.
        version (int): Incremented whenever :func:`integrate` sets a new bit.
    """
    obstacle: np.ndarray
    explored: np.ndarray
    categories: np.ndarray
    resolution: float
    origin: tuple
    labels: dict = field(default_factory=dict)
    version: int = 0

    @classmethod
    def empty(cls, size, num_categories, resolution, origin=(0.0, 0.0), labels=None):
        shape = (size, size)
        return cls(obstacle=np.zeros(shape, dtype=bool), explored=np.zeros(shape, dtype=bool),
                   categories=np.zeros((num_categories,) + shape, dtype=bool),
                   resolution=resolution, origin=tuple(origin), labels=dict(labels or {}))

    @classmethod
    def for_scene(cls, scene, margin=2):
        """An empty map covering ``scene`` plus ``margin`` cells on every side."""
        size = max(scene.shape) + 2 * margin
        origin = (-margin * scene.resolution, -margin * scene.resolution)
        return cls.empty(size, scene.num_categories, scene.resolution, origin, scene.labels)

    @property
    def size(self):
        return self.obstacle.shape[0]

    @property
    def shape(self):
        return self.obstacle.shape

    @property
    def num_categories(self):
        return self.categories.shape[0]

    @property
    def offset(self):
        """Map cell of scene cell (0, 0)."""
        return world_to_cell(0.0, 0.0, self.resolution, self.origin)

    def world_to_cell(self, x, y):
        return world_to_cell(x, y, self.resolution, self.origin)

    def pose_cell(self, pose):
        return self.world_to_cell(pose[0], pose[1])

    def cell_to_world(self, cell):
        return (self.origin[0] + cell[1] * self.resolution,
                self.origin[1] + cell[0] * self.resolution)

    def in_bounds(self, cell):
        return 0 <= cell[0] < self.size and 0 <= cell[1] < self.size

    def category_mask(self, category):
        return self.categories[category - 1]

    def category_id(self, name):
        for category, label in self.labels.items():
            if label == name:
                return category
        raise KeyError(name)

    @property
    def explored_area(self):
        """Explored area in square meters."""
        return float(self.explored.sum()) * self.resolution ** 2

    def snapshot(self):
        return copy.deepcopy(self)


def integrate(semantic_map, obs, pose):
    """Add the cells of ``obs`` to ``semantic_map`` in place and return it.

    Free cells become explored, obstacle cells explored and obstacle, and
    category cells explored, obstacle and their category channel. The cell
    under ``pose`` is marked explored. No bit is ever cleared.

    Raises:
        OutOfBounds: If an observed cell or the pose falls outside the map.
    """
    off_r, off_c = semantic_map.offset
    rows = np.asarray(obs.rows) + off_r
    cols = np.asarray(obs.cols) + off_c
    labels = np.asarray(obs.labels)
    agent = semantic_map.pose_cell(pose)
    size = semantic_map.size
    if len(rows) and (rows.min() < 0 or cols.min() < 0 or rows.max() >= size or cols.max() >= size):
        raise OutOfBounds('observed cells fall outside the semantic map')
    if not semantic_map.in_bounds(agent):
        raise OutOfBounds(f'pose cell {agent} falls outside the semantic map')
    if len(labels) and labels.max() > semantic_map.num_categories:
        raise OutOfBounds(f'category {labels.max()} has no map channel')

    before = (int(semantic_map.explored.sum()), int(semantic_map.obstacle.sum()),
              int(semantic_map.categories.sum()))
    semantic_map.explored[rows, cols] = True
    semantic_map.explored[agent] = True
    solid = labels != cn.FREE
    semantic_map.obstacle[rows[solid], cols[solid]] = True
    labeled = labels > 0
    semantic_map.categories[labels[labeled] - 1, rows[labeled], cols[labeled]] = True
    after = (int(semantic_map.explored.sum()), int(semantic_map.obstacle.sum()),
             int(semantic_map.categories.sum()))
    if after != before:
        semantic_map.version += 1
    return semantic_map


def frontier_cells(semantic_map):
    """Explored free cells 4-adjacent to an unexplored cell."""
    unexplored = ~semantic_map.explored
    near_unknown = ndimage.binary_dilation(unexplored, structure=_FOUR)
    return semantic_map.explored & ~semantic_map.obstacle & near_unknown


class FreeMask(typing.NamedTuple):
    free: np.ndarray
    resolution: float
    origin: tuple


def unoccupied_mask(semantic_map):
    """Traversable cells of the map after smoothing.

    Explored minus obstacle, closed with a 3x3 element, then enclosed unknown
    pockets of fewer than nine cells that hold no obstacle are filled. Cells
    filled this way are the only free cells outside the explored channel.
    """
    obstacle = semantic_map.obstacle
    free = semantic_map.explored & ~obstacle
    padded = np.pad(free, 2)
    free = ndimage.binary_closing(padded, structure=_CLOSING)[2:-2, 2:-2] & ~obstacle
    holes = ndimage.binary_fill_holes(free) & ~free
    if holes.any():
        pockets, count = ndimage.label(holes, structure=_FOUR)
        index = np.arange(1, count + 1)
        sizes = ndimage.sum(holes, pockets, index)
        blocked = ndimage.maximum(obstacle.astype(np.uint8), pockets, index)
        fill = index[(sizes < MAX_POCKET_CELLS) & ~np.asarray(blocked, dtype=bool)]
        free = free | np.isin(pockets, fill)
    return FreeMask(free=free, resolution=semantic_map.resolution, origin=semantic_map.origin)


class ObjectInstance(typing.NamedTuple):
    category: int
    centroid: tuple
    size: int
    key: int


def object_instances(semantic_map, category):
    """8-connected components of a category channel.

    Returns:
        list of ObjectInstance: One per component with its centroid in world
            meters and its cell count, ordered by the row-major index of the
            component's first cell.
    """
    channel = semantic_map.category_mask(category)
    components, count = ndimage.label(channel, structure=_EIGHT)
    if not count:
        return []
    index = np.arange(1, count + 1)
    centers = ndimage.center_of_mass(channel, components, index)
    sizes = ndimage.sum(channel, components, index)
    flat = np.arange(channel.size).reshape(channel.shape)
    keys = ndimage.minimum(flat, components, index)
    instances = []
    for (row, col), size, key in zip(centers, sizes, keys):
        x, y = semantic_map.cell_to_world((row, col))
        instances.append(ObjectInstance(category, (float(x), float(y)), int(size), int(key)))
    return sorted(instances, key=lambda instance: instance.key)


def dump_layers(semantic_map, directory):
    """Write one PGM image per channel into ``directory``.

    Returns:
        list of str: Paths written.
    """
    os.makedirs(directory, exist_ok=True)
    layers = [('obstacle', semantic_map.obstacle), ('explored', semantic_map.explored)]
    for category in range(1, semantic_map.num_categories + 1):
        name = semantic_map.labels.get(category, str(category))
        layers.append((f'category_{name}', semantic_map.category_mask(category)))
    paths = []
    for name, layer in layers:
        path = os.path.join(directory, f'{name}.pgm')
        Image.fromarray(layer.astype(np.uint8) * 255).save(path)
        paths.append(path)
    _logger.info('wrote map layers', extra={'event': 'map_dump', 'directory': directory,
                                            'layers': len(paths)})
    return paths
