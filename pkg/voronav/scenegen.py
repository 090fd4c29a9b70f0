"""Seeded procedural scenes: corridor mazes and furnished apartments."""

import logging
import math

import numpy as np

from . import constants as cn
from . import gridworld, loading
from .exceptions import GenerationFailure, ValidationError


_logger = logging.getLogger(__name__)

STYLES = ('maze', 'apartment')
MAX_ATTEMPTS = 20
WALL_CELLS = 2
MIN_START_CLEARANCE_M = 0.3
# the start must be farther than this from the goal's view points
MIN_START_DISTANCE_M = 1.0
MAZE_CORRIDOR_M = 0.8
ROOM_M = 2.75
DOOR_M = 1.0


def generate_scene(seed, style='apartment', size=6.0, resolution=0.05):
    """Build a valid scene whose goal is reachable from the start.

    Args:
        seed (int): Same seed, same scene.
        style (str): ``'maze'`` or ``'apartment'``.
        size (float): Approximate side length in meters.
        resolution (float): Meters per cell.

    Raises:
        GenerationFailure: If no valid scene came out of the bounded retries.
    """
    if style not in STYLES:
        raise ValidationError(f'unknown scene style {style!r}')
    builder = _maze if style == 'maze' else _apartment
    table = loading.load_relatedness_table()
    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng([seed, attempt])
        try:
            data = builder(rng, size, resolution, table)
            data['name'] = f'{style}_{seed}'
            _place_start(rng, data)
        except GenerationFailure as err:
            _logger.debug('retrying scene generation', extra={'event': 'generation_retry', 'seed': seed,
                                                              'attempt': attempt, 'error': repr(err)})
            continue
        scene = gridworld.Scene.from_dict(data)
        _logger.info('generated scene', extra={'event': 'scene_generated', 'scene': scene.name,
                                               'shape': scene.shape, 'goal': scene.goal_name})
        return scene
    raise GenerationFailure(f'no valid {style} scene for seed {seed} after {MAX_ATTEMPTS} attempts')


def _labels(table):
    return {i: name for i, name in enumerate(table['vocabulary'], start=1)}


def _cells(meters, resolution):
    return max(1, int(round(meters / resolution)))


def _scene_data(grid, resolution, labels, objects, goal):
    return {
        'name': '',
        'resolution_m': resolution,
        'grid': grid.tolist(),
        'labels': {str(k): v for k, v in labels.items()},
        'start': {'x': 0.0, 'y': 0.0, 'heading_deg': 0.0},
        'targets': [{'category': category, 'cells': [list(c) for c in cells]} for category, cells in objects],
        'goal': goal,
    }


def _divide(rng, rows, cols):
    """Recursive division of a ``rows`` x ``cols`` lattice.

    Returns:
        set: Open passages as ``((r, c), (r2, c2))`` pairs of adjacent lattice cells.
    """
    walls = set()
    stack = [(0, 0, rows, cols)]
    while stack:
        r0, c0, r1, c1 = stack.pop()
        height, width = r1 - r0, c1 - c0
        if height < 2 and width < 2:
            continue
        horizontal = height > width or (height == width and rng.random() < 0.5)
        if horizontal:
            split = int(rng.integers(r0, r1 - 1))
            gap = int(rng.integers(c0, c1))
            walls.update(((split, c), (split + 1, c)) for c in range(c0, c1) if c != gap)
            stack += [(r0, c0, split + 1, c1), (split + 1, c0, r1, c1)]
        else:
            split = int(rng.integers(c0, c1 - 1))
            gap = int(rng.integers(r0, r1))
            walls.update(((r, split), (r, split + 1)) for r in range(r0, r1) if r != gap)
            stack += [(r0, c0, r1, split + 1), (r0, split + 1, r1, c1)]
    passages = set()
    for r in range(rows):
        for c in range(cols):
            for other in ((r + 1, c), (r, c + 1)):
                if other[0] < rows and other[1] < cols and ((r, c), other) not in walls:
                    passages.add(((r, c), other))
    return passages


def _block(grid, top, left, height, width, value):
    grid[top:top + height, left:left + width] = value
    return tuple((r, c) for r in range(top, top + height) for c in range(left, left + width))


def _maze(rng, size, resolution, table):
    labels = _labels(table)
    ids = {name: i for i, name in labels.items()}
    inner = _cells(MAZE_CORRIDOR_M, resolution)
    pitch = inner + WALL_CELLS
    n = max(2, int(size / (pitch * resolution)))
    side = n * pitch + WALL_CELLS
    grid = np.full((side, side), cn.OBSTACLE, dtype=np.int64)

    def origin(cell):
        return WALL_CELLS + cell[0] * pitch, WALL_CELLS + cell[1] * pitch

    for r in range(n):
        for c in range(n):
            top, left = origin((r, c))
            grid[top:top + inner, left:left + inner] = cn.FREE
    passages = _divide(rng, n, n)
    for a, b in passages:
        top, left = origin(a)
        if b[0] > a[0]:
            grid[top + inner:top + pitch, left:left + inner] = cn.FREE
        else:
            grid[top:top + inner, left + inner:left + pitch] = cn.FREE
    for r in range(n - 1):
        for c in range(n - 1):
            around = {((r, c), (r, c + 1)), ((r, c), (r + 1, c)),
                      ((r + 1, c), (r + 1, c + 1)), ((r, c + 1), (r + 1, c + 1))}
            if around <= passages:
                top, left = origin((r, c))
                grid[top + inner:top + pitch, left + inner:left + pitch] = cn.FREE

    goal = cn.GOAL_CATEGORIES[int(rng.integers(len(cn.GOAL_CATEGORIES)))]
    lattice = [(r, c) for r in range(n) for c in range(n)]
    order = rng.permutation(len(lattice))
    extras = [name for name in table['vocabulary'] if name != goal]
    objects = []
    for k, index in enumerate(order[:min(len(order), 3)]):
        name = goal if k == 0 else extras[int(rng.integers(len(extras)))]
        extent = 4 if k == 0 else 3
        # tucked into a corner so the corridor stays passable
        top, left = origin(lattice[index])
        cells = _block(grid, top, left, extent, extent, ids[name])
        objects.append((ids[name], cells))
    return _scene_data(grid, resolution, labels, objects, goal)


def _apartment(rng, size, resolution, table):
    labels = _labels(table)
    ids = {name: i for i, name in labels.items()}
    n = max(2, int(round(size / ROOM_M)))
    inner = _cells(ROOM_M, resolution)
    pitch = inner + WALL_CELLS
    side = n * pitch + WALL_CELLS
    grid = np.full((side, side), cn.OBSTACLE, dtype=np.int64)
    door = _cells(DOOR_M, resolution)

    rooms = sorted(table['rooms'])
    kinds = [rooms[int(k)] for k in rng.integers(len(rooms), size=n * n)]
    doors = _spanning_doors(rng, n)
    door_zones = np.zeros(grid.shape, dtype=bool)
    for r in range(n):
        for c in range(n):
            top, left = WALL_CELLS + r * pitch, WALL_CELLS + c * pitch
            grid[top:top + inner, left:left + inner] = cn.FREE
    for a, b in doors:
        top, left = WALL_CELLS + a[0] * pitch, WALL_CELLS + a[1] * pitch
        start = (inner - door) // 2
        if b[0] > a[0]:
            rows, cols = slice(top + inner, top + pitch), slice(left + start, left + start + door)
            zone = slice(top + inner - door, top + pitch + door), cols
        else:
            rows, cols = slice(top + start, top + start + door), slice(left + inner, left + pitch)
            zone = rows, slice(left + inner - door, left + pitch + door)
        grid[rows, cols] = cn.FREE
        door_zones[zone] = True

    objects = []
    occupied = grid != cn.FREE
    for index, kind in enumerate(kinds):
        r, c = divmod(index, n)
        bounds = (WALL_CELLS + r * pitch, WALL_CELLS + c * pitch, inner)
        for name in table['rooms'][kind]:
            cells = _place_against_wall(rng, grid, occupied | door_zones, bounds,
                                        table['footprints_m'][name], resolution, ids[name])
            if cells:
                occupied = grid != cn.FREE
                objects.append((ids[name], cells))

    present = sorted({labels[category] for category, _ in objects} & set(cn.GOAL_CATEGORIES))
    if not present:
        raise GenerationFailure('no goal category was placed')
    goal = present[int(rng.integers(len(present)))]
    return _scene_data(grid, resolution, labels, objects, goal)


def _spanning_doors(rng, n):
    """A random spanning tree over the room lattice plus one extra door when possible."""
    edges = [((r, c), (r + dr, c + dc)) for r in range(n) for c in range(n)
             for dr, dc in ((1, 0), (0, 1)) if r + dr < n and c + dc < n]
    order = rng.permutation(len(edges))
    parent = {(r, c): (r, c) for r in range(n) for c in range(n)}

    def find(cell):
        while parent[cell] != cell:
            parent[cell] = parent[parent[cell]]
            cell = parent[cell]
        return cell

    doors, spare = [], []
    for index in order:
        a, b = edges[index]
        ra, rb = find(a), find(b)
        if ra == rb:
            spare.append((a, b))
            continue
        parent[rb] = ra
        doors.append((a, b))
    return doors + spare[:1]


def _place_against_wall(rng, grid, blocked, bounds, footprint, resolution, category, tries=30):
    """Stamp a footprint along a random wall of a room; None if it never fits."""
    top, left, inner = bounds
    depth, length = (_cells(v, resolution) for v in footprint)
    for _ in range(tries):
        wall = int(rng.integers(4))
        height, width = (depth, length) if wall in (0, 2) else (length, depth)
        if height > inner or width > inner:
            continue
        if wall == 0:
            r, c = top, left + int(rng.integers(inner - width + 1))
        elif wall == 2:
            r, c = top + inner - height, left + int(rng.integers(inner - width + 1))
        elif wall == 1:
            r, c = top + int(rng.integers(inner - height + 1)), left + inner - width
        else:
            r, c = top + int(rng.integers(inner - height + 1)), left
        margin = blocked[max(r - 1, 0):r + height + 1, max(c - 1, 0):c + width + 1]
        inside = blocked[r:r + height, c:c + width]
        # touching the wall is fine, touching other furniture or doors is not
        if inside.any() or (margin & (grid[max(r - 1, 0):r + height + 1,
                                           max(c - 1, 0):c + width + 1] != cn.OBSTACLE)).any():
            continue
        return _block(grid, r, c, height, width, category)
    return None


def _place_start(rng, data):
    """Pick a start cell with room to turn from which the goal is reachable but not yet in reach."""
    data['start'] = {'x': 0.0, 'y': 0.0, 'heading_deg': 0.0}
    grid = np.array(data['grid'])
    resolution = data['resolution_m']
    free = np.argwhere(grid == cn.FREE)
    # a throwaway scene gives clearance and goal distances
    draft = gridworld.Scene.from_dict({**data, 'start': {'x': float(free[0][1] * resolution),
                                                         'y': float(free[0][0] * resolution),
                                                         'heading_deg': 0.0}})
    roomy = free[draft.clearance[free[:, 0], free[:, 1]] >= MIN_START_CLEARANCE_M - 1e-9]
    if not len(roomy):
        raise GenerationFailure('no free cell with enough clearance for the start')
    if not gridworld.view_points(draft).any():
        raise GenerationFailure('the goal has no cell to stand and view it from')
    for index in rng.permutation(len(roomy))[:25]:
        row, col = (int(v) for v in roomy[index])
        pose = gridworld.Pose(col * resolution, row * resolution,
                              float(cn.TURN_DEG * int(rng.integers(int(360 / cn.TURN_DEG)))))
        distance = gridworld.distance_to_goal(draft, pose)
        if math.isfinite(distance) and distance > MIN_START_DISTANCE_M:
            data['start'] = {'x': pose.x, 'y': pose.y, 'heading_deg': pose.heading}
            return data
    raise GenerationFailure('no start cell reaches the goal')
