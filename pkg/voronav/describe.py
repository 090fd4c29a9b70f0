"""Text descriptions of candidate directions and the prompts built from them."""

import math
import typing
from dataclasses import dataclass

import numpy as np

from . import loading, utils
from .exceptions import DegenerateRay, MissingObservation
from .semantic_map import object_instances


_EPS = 1e-9
# deviation within this of the minimum counts as a tie
_TIE_TOLERANCE = 1e-9


class PathObject(typing.NamedTuple):
    """An object instance seen along a path.

    ``location`` is the instance centroid minus the agent position, in meters
    along the world axes.
    """
    category: int
    name: str
    location: tuple
    arc_length: float
    key: int


def collect_path_objects(semantic_map, path, corridor=None, *, distance_field=None,
                         origin=None, corridor_min=1.5):
    """Object instances whose centroid lies within the corridor around ``path``.

    Args:
        semantic_map (SemanticMap): The map holding the category channels.
        path: Map cells of the path, or an object with a ``cells`` attribute.
        corridor (float or None): Corridor half-width in meters. When None it
            is ``max(corridor_min, f)`` with ``f`` the distance field value at
            the path cell nearest to the object.
        distance_field (DistanceField or None): Field used for the default
            corridor.
        origin (tuple or None): World point locations are measured from;
            defaults to the first path cell.
        corridor_min (float): Lower bound of the default corridor.

    Returns:
        list of PathObject: Sorted by arc length of the nearest path cell.
    """
    cells = np.array(getattr(path, 'cells', path), dtype=float).reshape(-1, 2)
    if not len(cells):
        raise ValueError('path is empty')
    res = semantic_map.resolution
    arc = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(cells, axis=0).T) * res)])
    if origin is None:
        origin = semantic_map.cell_to_world(cells[0])
    found = []
    for category in range(1, semantic_map.num_categories + 1):
        for instance in object_instances(semantic_map, category):
            x, y = instance.centroid
            row = (y - semantic_map.origin[1]) / res
            col = (x - semantic_map.origin[0]) / res
            distances = np.hypot(cells[:, 0] - row, cells[:, 1] - col) * res
            nearest = int(np.argmin(distances))
            if corridor is not None:
                limit = corridor
            else:
                local = 0.0
                if distance_field is not None:
                    value = distance_field.values[int(cells[nearest, 0]), int(cells[nearest, 1])]
                    local = float(value) if np.isfinite(value) else 0.0
                limit = max(corridor_min, local)
            if distances[nearest] <= limit + _EPS:
                found.append(PathObject(
                    category=category,
                    name=semantic_map.labels.get(category, str(category)),
                    location=(x - origin[0], y - origin[1]),
                    arc_length=float(arc[nearest]),
                    key=instance.key))
    return sorted(found, key=lambda obj: (obj.arc_length, obj.category, obj.key))


def group_path_objects(neighbors, paths, objects_per_path):
    """Pool the objects of every path by the neighbor the path runs through.

    Returns:
        dict: Neighbor id to its de-duplicated objects in encounter order.
    """
    pooled = {neighbor: {} for neighbor in neighbors}
    for path, objects in zip(paths, objects_per_path):
        if path.neighbor not in pooled:
            continue
        seen = pooled[path.neighbor]
        for obj in objects:
            ident = (obj.category, obj.key)
            if ident not in seen or obj.arc_length < seen[ident].arc_length:
                seen[ident] = obj
    return {neighbor: sorted(seen.values(), key=lambda obj: (obj.arc_length, obj.category, obj.key))
            for neighbor, seen in pooled.items()}


def _meters(value):
    # +0.0 turns -0.0 into 0.0
    return f'{round(value, 1) + 0.0:.1f}'


def _object_text(obj):
    return loading.load_template('path_object').format(
        category=obj.name, x=_meters(obj.location[0]), y=_meters(obj.location[1]))


def render_path_prompt(groups, target):
    """Prompt asking for one summary per neighbor of the objects along its paths.

    Args:
        groups (dict): Neighbor id to list of :class:`PathObject`; blocks are
            numbered in neighbor id order.
        target (str): Goal category name.
    """
    lines = [loading.load_template('header').format(target=target)]
    for index, neighbor in enumerate(sorted(groups), start=1):
        objects = groups[neighbor]
        if objects:
            lines.append(loading.load_template('path_objects').format(
                index=index, objects=', '.join(_object_text(obj) for obj in objects)))
        else:
            lines.append(loading.load_template('path_empty').format(index=index))
    lines.append(loading.load_template('path_instruction'))
    return '\n'.join(lines)


class FarsightAssignment(typing.NamedTuple):
    neighbor_id: int
    bearing: float
    sector_index: int
    sector_heading: float
    deviation: float
    description: typing.Optional[str] = None


def angular_deviation(a, b):
    """Unsigned difference between two headings, in [0, 180]."""
    return abs(utils.signed_angle(a - b))


def match_farsight(agent_cell, neighbors, sectors):
    """Pick for each neighbor the panorama sector closest to its bearing.

    Args:
        agent_cell (tuple): Map cell of the agent node.
        neighbors (list): ``(id, cell)`` pairs.
        sectors (list of float): Panorama headings in capture order. Ties go
            to the earlier sector.

    Returns:
        list of FarsightAssignment: One per neighbor, in input order.

    Raises:
        DegenerateRay: If a neighbor cell equals ``agent_cell``.
    """
    assignments = []
    for neighbor, cell in neighbors:
        d_row, d_col = cell[0] - agent_cell[0], cell[1] - agent_cell[1]
        if d_row == 0 and d_col == 0:
            raise DegenerateRay(f'neighbor {neighbor} sits on the agent cell')
        bearing = utils.bearing_degrees(d_row, d_col)
        deviations = [angular_deviation(bearing, heading) for heading in sectors]
        best = min(deviations)
        index = next(i for i, value in enumerate(deviations) if value <= best + _TIE_TOLERANCE)
        assignments.append(FarsightAssignment(neighbor, bearing, index, sectors[index], deviations[index]))
    return assignments


def render_farsight_text(assignment, observations, labels):
    """Stub caption of the sector assigned to a neighbor.

    Args:
        assignment (FarsightAssignment): The neighbor's sector.
        observations: Observations indexed by sector index.
        labels (dict): Category id to name.

    Raises:
        MissingObservation: If the sector has no stored observation.
    """
    try:
        obs = observations[assignment.sector_index]
    except (KeyError, IndexError):
        obs = None
    if obs is None:
        raise MissingObservation(f'no observation for sector {assignment.sector_index}')
    nearest = {}
    row0, col0 = obs.agent_cell
    for (row, col), label in obs.visible_cells:
        if label <= 0:
            continue
        distance = math.hypot(row - row0, col - col0)
        name = labels.get(label, str(label))
        nearest[name] = min(distance, nearest.get(name, math.inf))
    if not nearest:
        return loading.load_template('farsight_open')
    names = sorted(nearest, key=lambda name: (nearest[name], name))
    return loading.load_template('farsight_view').format(categories=', '.join(names))


@dataclass
class NeighborContext:
    """Everything the decision prompt and the rewards know about one neighbor."""
    neighbor_id: int
    path_description: str = ''
    farsight_description: str = ''
    alpha: int = 0
    beta: int = 0
    semantic: typing.Optional[float] = None

    def __post_init__(self):
        placeholder = loading.load_template('no_information')
        self.path_description = self.path_description or placeholder
        self.farsight_description = self.farsight_description or placeholder


def render_decision_prompt(target, contexts, *, use_path=True, use_farsight=True):
    """Prompt asking for one probability per neighbor.

    Path and farsight lines are left out when the matching flag is off.

    Raises:
        ValueError: If ``contexts`` is empty.
    """
    if not contexts:
        raise ValueError('at least one neighbor context is required')
    lines = [loading.load_template('header').format(target=target)]
    for index, context in enumerate(contexts, start=1):
        lines.append(loading.load_template('decision_waypoint').format(index=index))
        if use_path:
            lines.append(loading.load_template('decision_path').format(
                description=context.path_description))
        if use_farsight:
            lines.append(loading.load_template('decision_farsight').format(
                description=context.farsight_description))
    lines.append(loading.load_template('decision_instruction').format(target=target))
    return '\n'.join(lines)
