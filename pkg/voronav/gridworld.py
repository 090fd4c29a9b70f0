"""A deterministic 2D grid simulator standing in for the RGB-D and pose sensors.

Cell ``(row, col)`` of a scene is centered at world ``(col * res, row * res)``.
Headings are degrees in [0, 360) measured from +x (increasing column) towards
+y (increasing row), so ``TurnLeft`` adds 30 degrees and ``TurnRight``
subtracts 30 degrees.
"""

import enum
import functools
import logging
import math
import typing
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage
from scipy.sparse import csgraph

from . import constants as cn
from . import loading, schemas, utils
from .exceptions import ParseError, ValidationError


_logger = logging.getLogger(__name__)

_MIN_SIDE = 8
_EPS = 1e-9


class Action(enum.Enum):
    STOP = 'Stop'
    MOVE_FORWARD = 'MoveForward'
    TURN_LEFT = 'TurnLeft'
    TURN_RIGHT = 'TurnRight'
    LOOK_UP = 'LookUp'
    LOOK_DOWN = 'LookDown'


def parse_action(name):
    """Return the :class:`Action` called ``name``.

    Raises:
        ParseError: If ``name`` is not one of the six action names.
    """
    if isinstance(name, Action):
        return name
    try:
        return Action(name)
    except ValueError as err:
        raise ParseError(f'unknown action: {name!r}') from err


class Pose(typing.NamedTuple):
    x: float
    y: float
    heading: float


def world_to_cell(x, y, resolution, origin=(0.0, 0.0)):
    """Return the ``(row, col)`` of the cell containing world point ``(x, y)``."""
    col = math.floor((x - origin[0]) / resolution + 0.5)
    row = math.floor((y - origin[1]) / resolution + 0.5)
    return row, col


@dataclass(frozen=True)
class Target:
    category: int
    cells: tuple


@dataclass(frozen=True, eq=False)
class Scene:
    """Ground-truth world. Immutable once built; share it freely across threads.

    Attributes:
        name (str): Scene name.
        grid (numpy.ndarray): Read-only 2D int array of cell codes: ``0``
            free, ``-1`` obstacle, ``k >= 1`` category ``k``.
        resolution (float): Meters per cell.
        start_pose (Pose): Start pose.
        targets (tuple of Target): Target instances.
        labels (dict): Category id to category name.
        goal (int): Goal category id.
    """
    name: str
    grid: np.ndarray
    resolution: float
    start_pose: Pose
    targets: tuple
    labels: dict
    goal: int

    @property
    def shape(self):
        return self.grid.shape

    @property
    def num_categories(self):
        return max(self.labels) if self.labels else 0

    @property
    def goal_name(self):
        return self.labels[self.goal]

    @property
    def goal_targets(self):
        return tuple(t for t in self.targets if t.category == self.goal)

    @functools.cached_property
    def solid(self):
        """Cells that block motion and sight: obstacles and object cells."""
        solid = self.grid != cn.FREE
        solid.setflags(write=False)
        return solid

    @functools.cached_property
    def goal_mask(self):
        mask = np.zeros(self.shape, dtype=bool)
        for target in self.goal_targets:
            for row, col in target.cells:
                mask[row, col] = True
        mask.setflags(write=False)
        return mask

    @functools.cached_property
    def clearance(self):
        """Distance in meters from each cell center to the nearest solid cell center.

        Cells beyond the grid border count as solid.
        """
        padded = np.pad(self.solid, 1, constant_values=True)
        clearance = ndimage.distance_transform_edt(~padded)[1:-1, 1:-1] * self.resolution
        clearance.setflags(write=False)
        return clearance

    def category_id(self, name):
        for category, label in self.labels.items():
            if label == name:
                return category
        raise KeyError(name)

    def pose_cell(self, pose):
        return world_to_cell(pose[0], pose[1], self.resolution)

    def cell_center(self, cell):
        return cell[1] * self.resolution, cell[0] * self.resolution

    def in_bounds(self, cell):
        return 0 <= cell[0] < self.shape[0] and 0 <= cell[1] < self.shape[1]

    def to_dict(self):
        """Return the scene in its JSON file format."""
        return {
            'name': self.name,
            'resolution_m': self.resolution,
            'grid': self.grid.tolist(),
            'labels': {str(k): v for k, v in sorted(self.labels.items())},
            'start': {'x': self.start_pose.x, 'y': self.start_pose.y,
                      'heading_deg': self.start_pose.heading},
            'targets': [{'category': t.category, 'cells': [list(c) for c in t.cells]}
                        for t in self.targets],
            'goal': self.goal_name,
        }

    @classmethod
    def from_dict(cls, data):
        """Build and validate a scene from its JSON file format.

        Raises:
            ParseError: If ``data`` is structurally malformed.
            ValidationError: If the scene violates an invariant, e.g. the
                start cell is not free or there are no target cells.
        """
        try:
            schemas.scene.validate(data)
        except ValueError as err:
            raise ParseError(str(err)) from err
        rows = data['grid']
        if len({len(row) for row in rows}) != 1:
            raise ParseError('grid is not rectangular')
        grid = np.array(rows, dtype=np.int64)
        if grid.shape[0] < _MIN_SIDE or grid.shape[1] < _MIN_SIDE:
            raise ValidationError(f'grid must be at least {_MIN_SIDE}x{_MIN_SIDE}, got {grid.shape}')
        try:
            labels = {int(k): v for k, v in data['labels'].items()}
        except ValueError as err:
            raise ParseError('label keys must be integer strings') from err
        unknown = set(np.unique(grid[grid > 0]).tolist()) - set(labels)
        if unknown:
            raise ValidationError(f'grid uses unlabeled categories {sorted(unknown)}')
        resolution = float(data['resolution_m'])
        start = data['start']
        pose = Pose(float(start['x']), float(start['y']), utils.wrap_degrees(float(start['heading_deg'])))

        targets = []
        for entry in data['targets']:
            category = entry['category']
            cells = tuple(sorted((int(r), int(c)) for r, c in entry['cells']))
            if not cells:
                raise ValidationError(f'target of category {category} has no cells')
            for row, col in cells:
                if not (0 <= row < grid.shape[0] and 0 <= col < grid.shape[1]):
                    raise ValidationError(f'target cell {(row, col)} outside the grid')
                if grid[row, col] != category:
                    raise ValidationError(f'target cell {(row, col)} is not labeled {category}')
            targets.append(Target(category, cells))
        if not targets:
            raise ValidationError('scene has no target cells')

        if 'goal' in data:
            names = {v: k for k, v in labels.items()}
            if data['goal'] not in names:
                raise ValidationError(f'unknown goal category {data["goal"]!r}')
            goal = names[data['goal']]
        else:
            goal = targets[0].category
        if not any(t.category == goal for t in targets):
            raise ValidationError(f'goal category {labels[goal]!r} has no target instance')

        grid.setflags(write=False)
        scene = cls(name=data['name'], grid=grid, resolution=resolution, start_pose=pose,
                    targets=tuple(targets), labels=labels, goal=goal)
        start_cell = scene.pose_cell(pose)
        if not scene.in_bounds(start_cell):
            raise ValidationError(f'start cell {start_cell} outside the grid')
        if grid[start_cell] != cn.FREE:
            raise ValidationError(f'start cell {start_cell} is not free')
        return scene


def load_scene(path):
    """Load and validate a scene file.

    Raises:
        ParseError: If the file is not valid JSON or its grid is malformed.
        ValidationError: If the scene violates an invariant.
    """
    scene = Scene.from_dict(loading.load_file(path))
    _logger.debug('loaded scene', extra={'event': 'scene_loaded', 'scene': scene.name,
                                         'shape': scene.shape})
    return scene


@dataclass(frozen=True)
class SimState:
    """Agent state for one episode. Never mutated; :func:`step` returns a new one."""
    pose: Pose
    step_count: int = 0
    collision_count: int = 0
    forward_count: int = 0
    done: bool = False
    history: tuple = ()
    path_length: float = 0.0
    last_collision: bool = False


def initial_state(scene):
    return SimState(pose=scene.start_pose, history=(scene.start_pose,))


def advance(pose, action, step_size=cn.FORWARD_STEP_M, turn_deg=cn.TURN_DEG):
    """Pose after ``action`` from ``pose`` when nothing is in the way."""
    if action is Action.MOVE_FORWARD:
        heading = math.radians(pose.heading)
        return Pose(round(pose.x + step_size * math.cos(heading), 9),
                    round(pose.y + step_size * math.sin(heading), 9), pose.heading)
    if action is Action.TURN_LEFT:
        return pose._replace(heading=utils.wrap_degrees(round(pose.heading + turn_deg, 9)))
    if action is Action.TURN_RIGHT:
        return pose._replace(heading=utils.wrap_degrees(round(pose.heading - turn_deg, 9)))
    return pose


def step(state, scene, action, *, agent_radius=cn.AGENT_RADIUS_M,
         step_size=cn.FORWARD_STEP_M, turn_deg=cn.TURN_DEG):
    """Apply ``action`` and return the successor state.

    A ``MoveForward`` whose swept disc would touch a solid cell leaves the
    pose unchanged and counts a collision; it still counts as a forward step.

    Raises:
        ValueError: If ``state.done`` is already set.
    """
    if state.done:
        raise ValueError('cannot step a finished episode')
    action = parse_action(action)
    pose = state.pose
    collision = False
    forwards = state.forward_count
    length = state.path_length
    moved = advance(pose, action, step_size, turn_deg)
    if action is Action.MOVE_FORWARD:
        forwards += 1
        if sweep_blocked(scene, (pose.x, pose.y), (moved.x, moved.y), agent_radius):
            collision = True
        else:
            pose = moved
            length += step_size
    else:
        pose = moved
    return replace(
        state,
        pose=pose,
        step_count=state.step_count + 1,
        collision_count=state.collision_count + int(collision),
        forward_count=forwards,
        done=action is Action.STOP,
        history=state.history + (pose,),
        path_length=length,
        last_collision=collision,
    )


def sweep_blocked(scene, start, end, radius):
    """Return True if a disc of ``radius`` moving from ``start`` to ``end`` touches a solid cell of ``scene``."""
    return disc_hits(scene.solid, start, end, radius, scene.resolution)


def disc_hits(solid, start, end, radius, resolution, origin=(0.0, 0.0)):
    """Return True if a disc of ``radius`` moving from ``start`` to ``end`` touches a cell of ``solid``.

    Positions are sampled along the segment every half cell, the start
    excluded. Each cell is a square of side ``resolution`` centered at
    ``origin + (col, row) * resolution``. Space beyond the grid border is solid.
    """
    res = resolution
    start = np.asarray(start, dtype=float) - origin
    end = np.asarray(end, dtype=float) - origin
    count = max(1, math.ceil(np.hypot(*(end - start)) / (res / 2)))
    t = np.arange(1, count + 1) / count
    points = start + t[:, None] * (end - start)

    reach = radius + res
    col0 = math.floor((points[:, 0].min() - reach) / res)
    col1 = math.ceil((points[:, 0].max() + reach) / res)
    row0 = math.floor((points[:, 1].min() - reach) / res)
    row1 = math.ceil((points[:, 1].max() + reach) / res)
    rr, cc = np.mgrid[row0:row1 + 1, col0:col1 + 1]
    inside = (rr >= 0) & (rr < solid.shape[0]) & (cc >= 0) & (cc < solid.shape[1])
    hit = ~inside
    hit[inside] = solid[rr[inside], cc[inside]]
    if not hit.any():
        return False
    centers_x = cc[hit] * res
    centers_y = rr[hit] * res
    dx = np.maximum(np.abs(points[:, 0, None] - centers_x) - res / 2, 0.0)
    dy = np.maximum(np.abs(points[:, 1, None] - centers_y) - res / 2, 0.0)
    return bool((np.hypot(dx, dy) < radius).any())


@dataclass(frozen=True, eq=False)
class Observation:
    """Cells seen from one pose, in row-major order.

    Attributes:
        rows, cols (numpy.ndarray): Scene indices of the visible cells.
        labels (numpy.ndarray): Scene codes of the visible cells.
        sector_heading (float): Agent heading at capture time.
        agent_cell (tuple): Scene cell the rays were cast from.
    """
    rows: np.ndarray
    cols: np.ndarray
    labels: np.ndarray
    sector_heading: float
    agent_cell: tuple

    @property
    def visible_cells(self):
        return [((int(r), int(c)), int(v)) for r, c, v in zip(self.rows, self.cols, self.labels)]

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        if not isinstance(other, Observation):
            return NotImplemented
        return (self.sector_heading == other.sector_heading
                and self.agent_cell == other.agent_cell
                and np.array_equal(self.rows, other.rows)
                and np.array_equal(self.cols, other.cols)
                and np.array_equal(self.labels, other.labels))


def cone_cells(shape, agent_cell, heading, resolution, hfov=cn.HFOV_DEG, depth_range=cn.DEPTH_RANGE_M):
    """Cells whose centers lie in the field-of-view cone, ignoring occlusion.

    Returns:
        tuple: ``(rows, cols)`` arrays in row-major order, agent cell included.
    """
    row0, col0 = agent_cell
    reach = int(math.floor(depth_range / resolution + _EPS))
    rows = np.arange(max(0, row0 - reach), min(shape[0], row0 + reach + 1))
    cols = np.arange(max(0, col0 - reach), min(shape[1], col0 + reach + 1))
    rr, cc = np.meshgrid(rows, cols, indexing='ij')
    rr, cc = rr.ravel(), cc.ravel()
    d_row, d_col = rr - row0, cc - col0
    distance = np.hypot(d_row, d_col) * resolution
    bearing = np.degrees(np.arctan2(d_row, d_col))
    deviation = np.abs((bearing - heading + 180.0) % 360.0 - 180.0)
    keep = (distance <= depth_range + _EPS) & (deviation <= hfov / 2 + _EPS)
    keep |= (d_row == 0) & (d_col == 0)
    return rr[keep], cc[keep]


def _line_of_sight(solid, agent_cell, rows, cols):
    """Return a mask over ``(rows, cols)`` of cells not hidden behind a solid cell.

    Each ray is sampled every half cell; a sample falling on a solid cell other
    than the ray's own start and end cells blocks it.
    """
    row0, col0 = agent_cell
    d_row, d_col = rows - row0, cols - col0
    span = np.maximum(np.abs(d_row), np.abs(d_col))
    visible = np.ones(len(rows), dtype=bool)
    low = 1
    while low <= (span.max() if len(span) else 0):
        high = low * 2
        chosen = np.nonzero((span > low) & (span <= high) if low > 1 else (span <= high))[0]
        low = high
        if not len(chosen):
            continue
        samples = 2 * high
        t = np.arange(1, samples) / samples
        sample_r = np.floor(row0 + d_row[chosen, None] * t + 0.5).astype(np.int64)
        sample_c = np.floor(col0 + d_col[chosen, None] * t + 0.5).astype(np.int64)
        own = ((sample_r == rows[chosen, None]) & (sample_c == cols[chosen, None])) \
            | ((sample_r == row0) & (sample_c == col0))
        blocked = solid[sample_r, sample_c] & ~own
        visible[chosen] = ~blocked.any(axis=1)
    return visible


def observe(state, scene, *, hfov=cn.HFOV_DEG, depth_range=cn.DEPTH_RANGE_M):
    """Raycast the cells visible from ``state.pose``.

    Every cell whose center lies within ``hfov`` degrees centered on the
    heading and within ``depth_range`` meters is reported unless a solid cell
    sits between it and the agent. Solid cells are themselves visible.
    """
    agent_cell = scene.pose_cell(state.pose)
    rows, cols = cone_cells(scene.shape, agent_cell, state.pose.heading, scene.resolution,
                            hfov=hfov, depth_range=depth_range)
    visible = _line_of_sight(scene.solid, agent_cell, rows, cols)
    rows, cols = rows[visible], cols[visible]
    return Observation(rows=rows, cols=cols, labels=scene.grid[rows, cols],
                       sector_heading=state.pose.heading, agent_cell=agent_cell)


def geodesic_field(passable, sources, resolution):
    """Shortest 8-connected path length in meters from every cell to the nearest cell of ``sources``.

    Paths run over ``passable`` cells plus the sources; diagonal steps cost
    ``sqrt(2) * res``. Cells that cannot reach a source are ``inf``.
    """
    sources = np.asarray(sources, dtype=bool)
    distances = np.full(sources.shape, math.inf)
    if not sources.any():
        return distances
    graph, index = utils.grid_graph(passable | sources, resolution)
    reached = csgraph.dijkstra(graph, directed=False, indices=index[sources], min_only=True)
    inside = index >= 0
    distances[inside] = reached[index[inside]]
    return distances


def geodesic_distance(scene, a, b):
    """Shortest 8-connected path length in meters from pose ``a`` to the nearest cell of ``b``.

    Paths run over free cells plus the cells of ``b``.

    Returns:
        float: The distance, or ``inf`` if no cell of ``b`` is reachable.
    """
    b_mask = np.zeros(scene.shape, dtype=bool)
    for cell in b:
        if scene.in_bounds(cell):
            b_mask[cell[0], cell[1]] = True
    start = scene.pose_cell(a)
    if not b_mask.any() or not scene.in_bounds(start):
        return math.inf
    if b_mask[start]:
        return 0.0
    if scene.solid[start]:
        return math.inf
    return float(geodesic_field(~scene.solid, b_mask, scene.resolution)[start])


def default_view_radius(resolution, agent_radius=cn.AGENT_RADIUS_M):
    """Closest standable distance to an object: the agent's radius plus one cell."""
    return agent_radius + resolution


def view_point_mask(solid, goal, resolution, radius=None, agent_radius=cn.AGENT_RADIUS_M):
    """Cells within ``radius`` of a ``goal`` cell where the agent can stand.

    A view point is not solid and its clearance, from its center to the
    nearest solid center with the grid border counted as solid, is at least
    ``agent_radius - res``. ``radius`` defaults to :func:`default_view_radius`.
    """
    if radius is None:
        radius = default_view_radius(resolution, agent_radius)
    if not goal.any():
        return np.zeros(goal.shape, dtype=bool)
    near = ndimage.distance_transform_edt(~goal) * resolution <= radius + _EPS
    padded = np.pad(solid, 1, constant_values=True)
    clearance = ndimage.distance_transform_edt(~padded)[1:-1, 1:-1] * resolution
    return near & ~solid & (clearance >= agent_radius - resolution - _EPS)


def success_mask(solid, goal, resolution, success_radius, radius=None, agent_radius=cn.AGENT_RADIUS_M):
    """Non-solid cells geodesically closer than ``success_radius`` to a view point of ``goal``."""
    points = view_point_mask(solid, goal, resolution, radius, agent_radius)
    return ~solid & (geodesic_field(~solid, points, resolution) < success_radius)


def view_points(scene, radius=None, agent_radius=cn.AGENT_RADIUS_M):
    """Free cells of ``scene`` from which the goal counts as found."""
    return view_point_mask(scene.solid, scene.goal_mask, scene.resolution, radius, agent_radius)


def distance_to_goal(scene, pose, radius=None, agent_radius=cn.AGENT_RADIUS_M):
    """Geodesic distance from ``pose`` to the nearest goal view point."""
    points = view_points(scene, radius, agent_radius)
    if not points.any():
        points = scene.goal_mask
    return geodesic_distance(scene, pose, [tuple(c) for c in np.argwhere(points)])
