"""Hierarchical rewards, mid-term goal selection and the fast-marching local policy."""

import collections
import logging
import math
import typing
from dataclasses import dataclass

import numpy as np
import skfmm
from scipy import ndimage
from skimage import morphology

from . import constants as cn
from . import gridworld, utils
from .exceptions import NoNeighbors, UnreachableGoal
from .gridworld import Action, world_to_cell
from .voronoi import DistanceField


_logger = logging.getLogger(__name__)

_FOUR = ndimage.generate_binary_structure(2, 1)
_EPS = 1e-9
FORWARD_TOLERANCE_DEG = 15.0
APPROACH_ACTIONS = 6


@dataclass(frozen=True)
class RewardBundle:
    """Reward vectors over the neighbor nodes, ordered by node id.

    Attributes:
        neighbors (tuple): Neighbor node ids.
        P (tuple): Exploration rewards, each 0 or 2.
        C (tuple): Efficiency rewards, each 0 or 1.
        L (tuple): Semantic scores in [0.01, 0.99].
    """
    neighbors: tuple
    P: tuple
    C: tuple
    L: tuple

    def __post_init__(self):
        n = len(self.neighbors)
        if not len(self.P) == len(self.C) == len(self.L) == n:
            raise ValueError('reward vectors must have one entry per neighbor')
        if any(p not in (0, 2) for p in self.P):
            raise ValueError(f'exploration rewards must be 0 or 2, got {self.P}')
        if any(c not in (0, 1) for c in self.C):
            raise ValueError(f'efficiency rewards must be 0 or 1, got {self.C}')

    @property
    def W(self):
        return tuple(p + c + l for p, c, l in zip(self.P, self.C, self.L))

    def to_dict(self):
        return {'P': list(self.P), 'C': list(self.C), 'L': list(self.L), 'W': list(self.W)}


def exploration_reward(rvg, paths):
    """2 for each neighbor that some exploratory path runs through, else 0."""
    tagged = {path.neighbor for path in paths}
    return [2 if neighbor in tagged else 0 for neighbor in rvg.neighbors]


def efficiency_reward(rvg, history, radius):
    """0 for each neighbor that a past pose came within ``radius`` of, else 1."""
    points = np.array([(pose[0], pose[1]) for pose in history], dtype=float).reshape(-1, 2)
    rewards = []
    for neighbor in rvg.neighbors:
        x, y = rvg.position(neighbor)
        covered = len(points) and (np.hypot(points[:, 0] - x, points[:, 1] - y) <= radius + _EPS).any()
        rewards.append(0 if covered else 1)
    return rewards


def select_subgoal(P, C, L, rvg, pose=None, exclude=()):
    """Neighbor with the highest ``P + C + L``.

    Ties go to the neighbor whose bearing is closest to the current heading,
    then to the lowest id. When no neighbor earns an exploration or an
    efficiency reward the sentinel ``FRONTIER_FALLBACK`` is returned instead.

    Args:
        P, C, L (sequence): Reward vectors ordered like ``rvg.neighbors``.
        rvg (ClassifiedRVG): The classified graph.
        pose (Pose or None): Agent pose for the bearing tie-break.
        exclude (collection): Neighbor ids that may not be chosen.

    Raises:
        NoNeighbors: If the agent node has no selectable neighbor.
    """
    neighbors = rvg.neighbors
    if not neighbors:
        raise NoNeighbors('agent node has no neighbors')
    if not len(P) == len(C) == len(L) == len(neighbors):
        raise ValueError('reward vectors must have one entry per neighbor')
    if not any(P) and not any(C):
        return cn.FRONTIER_FALLBACK
    candidates = [i for i, neighbor in enumerate(neighbors) if neighbor not in exclude]
    if not candidates:
        raise NoNeighbors('every neighbor is excluded')

    def turn(i):
        if pose is None:
            return 0.0
        x, y = rvg.position(neighbors[i])
        bearing = math.degrees(math.atan2(y - pose[1], x - pose[0]))
        return abs(utils.signed_angle(bearing - pose[2]))

    W = [P[i] + C[i] + L[i] for i in range(len(neighbors))]
    best = max(W[i] for i in candidates)
    tied = [i for i in candidates if W[i] == best]
    choice = min(tied, key=lambda i: (turn(i), neighbors[i]))
    return neighbors[choice]


def dilation_element(agent_radius, resolution):
    return morphology.disk(int(math.ceil(agent_radius / resolution - _EPS)))


def traversable_mask(semantic_map, agent_radius, agent_cell=None, blocked=None):
    """Cells the agent's center may occupy: everything but dilated obstacles.

    Unexplored cells count as traversable. ``blocked`` adds obstacles (for
    example cells learned from collisions). The 3x3 block around
    ``agent_cell`` is cleared of dilation so the agent can always leave.
    """
    obstacle = semantic_map.obstacle
    if blocked is not None:
        obstacle = obstacle | blocked
    dilated = ndimage.binary_dilation(obstacle, structure=dilation_element(agent_radius, semantic_map.resolution))
    if agent_cell is not None:
        row, col = agent_cell
        window = (slice(max(0, row - 1), row + 2), slice(max(0, col - 1), col + 2))
        dilated[window] = obstacle[window]
    return ~dilated


def fmm_field(semantic_map, goal, agent_radius=cn.AGENT_RADIUS_M, agent_cell=None, blocked=None):
    """Fast-marching distance to ``goal`` over the traversable cells of the map.

    Args:
        semantic_map (SemanticMap): Source of the obstacle channel.
        goal: Boolean mask or iterable of map cells.
        agent_radius (float): Obstacles are dilated by this many meters.
        agent_cell (tuple or None): Cell kept traversable around the agent.
        blocked (numpy.ndarray or None): Extra obstacle cells.

    Returns:
        DistanceField: Meters to the goal; ``inf`` on untraversable cells and
            on cells that cannot reach the goal.

    Raises:
        UnreachableGoal: If the goal is empty or lies entirely on obstacles.
    """
    shape = semantic_map.shape
    if isinstance(goal, np.ndarray) and goal.dtype == bool:
        goal_mask = goal.copy()
    else:
        goal_mask = np.zeros(shape, dtype=bool)
        for cell in goal:
            if semantic_map.in_bounds(cell):
                goal_mask[cell[0], cell[1]] = True
    traversable = traversable_mask(semantic_map, agent_radius, agent_cell, blocked)
    goal_mask &= ~semantic_map.obstacle
    if not goal_mask.any():
        raise UnreachableGoal('goal set is empty')
    traversable |= goal_mask

    components, _ = ndimage.label(traversable, structure=_FOUR)
    linked = np.isin(components, np.unique(components[goal_mask]))
    values = np.full(shape, np.inf)
    if (linked & ~goal_mask).any():
        phi = np.ma.MaskedArray(np.ones(shape), mask=~linked)
        phi[goal_mask] = 0
        distance = skfmm.distance(phi, dx=semantic_map.resolution)
        values[linked] = np.ma.filled(distance, np.inf)[linked]
    values[goal_mask] = 0.0
    return DistanceField(values=values, resolution=semantic_map.resolution, origin=semantic_map.origin)


def descent_path(field, start, max_length=None):
    """Steepest-descent walk over 8-neighbors from ``start`` toward the field's zero set.

    The walk ends on a zero cell, at a cell with no lower neighbor, or once it
    is more than ``max_length`` meters (straight line) from ``start``.
    """
    values = field.values
    path = [tuple(start)]
    row, col = start
    while values[row, col] > 0:
        best = None
        for d_row, d_col in utils.NEIGHBOR_OFFSETS:
            r, c = row + d_row, col + d_col
            if 0 <= r < values.shape[0] and 0 <= c < values.shape[1] and values[r, c] < values[row, col]:
                if best is None or values[r, c] < values[best]:
                    best = (r, c)
        if best is None:
            break
        row, col = best
        path.append(best)
        if max_length is not None and math.hypot(row - start[0], col - start[1]) * field.resolution >= max_length:
            break
    return path


def local_action(field, state, step_size=cn.FORWARD_STEP_M):
    """Next discrete action along the descent path of ``field``.

    The first path point at least one step away is the immediate objective.
    A heading error of at most 15 degrees moves forward; otherwise the agent
    turns toward the objective, right on an exact 180 degree error.

    Returns:
        Action: ``STOP`` when the agent already stands on a zero cell.

    Raises:
        UnreachableGoal: If the agent cell has an infinite value or the
            descent cannot leave it.
    """
    pose = state.pose
    cell = world_to_cell(pose.x, pose.y, field.resolution, field.origin)
    shape = field.values.shape
    if not (0 <= cell[0] < shape[0] and 0 <= cell[1] < shape[1]) or not np.isfinite(field.values[cell]):
        raise UnreachableGoal(f'agent cell {cell} cannot reach the goal')
    if field.values[cell] == 0:
        return Action.STOP

    objective = None
    for point in descent_path(field, cell):
        x = field.origin[0] + point[1] * field.resolution
        y = field.origin[1] + point[0] * field.resolution
        objective = (x, y)
        if math.hypot(x - pose.x, y - pose.y) >= step_size - _EPS:
            break
    if objective is None or objective == (field.origin[0] + cell[1] * field.resolution,
                                          field.origin[1] + cell[0] * field.resolution):
        raise UnreachableGoal(f'no descent from agent cell {cell}')
    bearing = math.degrees(math.atan2(objective[1] - pose.y, objective[0] - pose.x))
    error = utils.signed_angle(bearing - pose.heading)
    if abs(error) <= FORWARD_TOLERANCE_DEG + _EPS:
        return Action.MOVE_FORWARD
    return Action.TURN_LEFT if error > 0 else Action.TURN_RIGHT


def approach_plan(pose, accept, solid, resolution, origin=(0.0, 0.0), agent_radius=cn.AGENT_RADIUS_M,
                  max_actions=APPROACH_ACTIONS, step_size=cn.FORWARD_STEP_M, turn_deg=cn.TURN_DEG):
    """Fewest actions that bring ``pose`` onto an ``accept`` cell.

    Breadth-first over ``MoveForward``, ``TurnLeft`` and ``TurnRight``. A
    forward move whose swept disc touches a ``solid`` cell is pruned.

    Args:
        pose (Pose): Where the search starts.
        accept (numpy.ndarray): Boolean mask of target cells.
        solid (numpy.ndarray): Boolean mask of cells to keep clear of.
        resolution (float): Meters per cell.
        origin (tuple): World position of cell ``(0, 0)``.

    Returns:
        list: The actions, empty when ``pose`` is already accepted, or None
            if nothing within ``max_actions`` actions gets there.
    """
    def accepted(candidate):
        row, col = world_to_cell(candidate.x, candidate.y, resolution, origin)
        return 0 <= row < accept.shape[0] and 0 <= col < accept.shape[1] and bool(accept[row, col])

    if accepted(pose):
        return []
    seen = {pose}
    queue = collections.deque([(pose, [])])
    while queue:
        current, plan = queue.popleft()
        if len(plan) >= max_actions:
            continue
        for action in (Action.MOVE_FORWARD, Action.TURN_LEFT, Action.TURN_RIGHT):
            candidate = gridworld.advance(current, action, step_size, turn_deg)
            if candidate in seen:
                continue
            if action is Action.MOVE_FORWARD and gridworld.disc_hits(
                    solid, (current.x, current.y), (candidate.x, candidate.y), agent_radius, resolution, origin):
                continue
            seen.add(candidate)
            if accepted(candidate):
                return plan + [action]
            queue.append((candidate, plan + [action]))
    return None
