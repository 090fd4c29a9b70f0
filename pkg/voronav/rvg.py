"""Reduced Voronoi Graph: skeleton to graph, reduction, node roles and exploratory paths.

Graphs are ``networkx.MultiGraph`` objects so parallel chains between two
nodes and loops back onto a node survive. Nodes carry ``cell`` and
``pixels``; edges carry ``chain`` (skeleton pixels from ``ends[0]`` to
``ends[1]``), ``ends`` and ``length`` in meters.
"""

import enum
import logging
import math
import typing
from dataclasses import dataclass

import jinja2
import networkx as nx
import numpy as np
from scipy import ndimage
from scipy.sparse import csgraph

from . import loading, utils
from .config import ReduceParams
from .exceptions import EmptySkeleton
from .semantic_map import frontier_cells


_logger = logging.getLogger(__name__)

_EIGHT = np.ones((3, 3), dtype=bool)
_DEGREE_KERNEL = np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]])
_EPS = 1e-9


class Role(enum.Enum):
    AGENT = 'AGENT'
    NEIGHBOR = 'NEIGHBOR'
    EXPLORATORY = 'EXPLORATORY'
    ORDINARY = 'ORDINARY'


class RawGraph:
    """Nodes and pixel-chain edges of a skeleton.

    Args:
        graph (networkx.MultiGraph): The graph, annotated as described in the
            module docstring.
        resolution (float): Meters per cell.
        origin (tuple): World coordinates of cell (0, 0).
        shape (tuple): Shape of the skeleton grid.
    """

    def __init__(self, graph, resolution, origin, shape):
        self.graph = graph
        self.resolution = resolution
        self.origin = tuple(origin)
        self.shape = tuple(shape)

    @property
    def nodes(self):
        return sorted(self.graph.nodes)

    def __len__(self):
        return self.graph.number_of_nodes()

    def cell(self, node):
        return self.graph.nodes[node]['cell']

    def position(self, node):
        """World coordinates of a node's cell."""
        row, col = self.cell(node)
        return self.origin[0] + col * self.resolution, self.origin[1] + row * self.resolution

    def degree(self, node):
        return self.graph.degree(node)

    def neighbors(self, node):
        return sorted(n for n in self.graph.neighbors(node) if n != node)

    def edges(self):
        """``(u, v, data)`` triples in a deterministic order."""
        return sorted(((min(u, v), max(u, v), data) for u, v, data in self.graph.edges(data=True)),
                      key=lambda e: (e[0], e[1], e[2]['chain']))

    def pixel_owners(self):
        """Map each owned skeleton pixel to ``('node', id)`` or ``('edge', (u, v))``."""
        owners = {}
        for u, v, data in self.edges():
            for pixel in data['chain']:
                owners.setdefault(pixel, ('edge', (u, v)))
        for node in self.nodes:
            for pixel in self.graph.nodes[node]['pixels']:
                owners[pixel] = ('node', node)
        return owners

    def to_networkx(self):
        """A simple weighted ``networkx.Graph`` keeping the shortest of parallel edges."""
        simple = nx.Graph()
        for node in self.nodes:
            simple.add_node(node, cell=self.cell(node))
        for u, v, data in self.edges():
            if u == v:
                continue
            if not simple.has_edge(u, v) or simple[u][v]['length'] > data['length']:
                simple.add_edge(u, v, length=data['length'])
        return simple

    def copy(self):
        return RawGraph(self.graph.copy(), self.resolution, self.origin, self.shape)


def _step_cost(a, b, resolution):
    return math.hypot(a[0] - b[0], a[1] - b[1]) * resolution


def _chain_length(chain, resolution):
    return sum(_step_cost(a, b, resolution) for a, b in zip(chain, chain[1:]))


def _add_chain(graph, u, v, chain, resolution, length=None):
    chain = tuple(chain)
    if length is None:
        length = _chain_length(chain, resolution)
    graph.add_edge(u, v, chain=chain, ends=(u, v), length=length)


def _oriented(data, start):
    """The edge's chain running away from node ``start``."""
    chain = data['chain']
    return chain if data['ends'][0] == start else chain[::-1]


def _nearest_to_centroid(pixels):
    pixels = sorted(pixels)
    points = np.array(pixels, dtype=float)
    centroid = points.mean(axis=0)
    index = int(np.argmin(((points - centroid) ** 2).sum(axis=1)))
    return pixels[index]


def extract_graph(skel):
    """Turn a skeleton into nodes and pixel-chain edges.

    Pixels whose 8-neighborhood holds other than two skeleton pixels are node
    pixels; touching node pixels form one node placed at the pixel nearest
    their centroid. Maximal runs of two-neighbor pixels become edges. A loop
    with no node pixel gets a node at its first row-major pixel.

    Raises:
        EmptySkeleton: If the skeleton has no pixel.
    """
    mask = np.asarray(skel.mask, dtype=bool)
    if not mask.any():
        raise EmptySkeleton('skeleton is empty')
    height, width = mask.shape
    degree = ndimage.convolve(mask.astype(np.int64), _DEGREE_KERNEL, mode='constant') * mask
    node_pixels = mask & (degree != 2)
    clusters, count = ndimage.label(node_pixels, structure=_EIGHT)
    node_of = clusters.astype(np.int64) - 1
    visited = np.zeros(mask.shape, dtype=bool)
    graph = nx.MultiGraph()

    located = np.argwhere(node_pixels)
    members = {}
    for (row, col), label in zip(located, clusters[node_pixels]):
        members.setdefault(int(label) - 1, []).append((int(row), int(col)))
    for node in range(count):
        pixels = members[node]
        graph.add_node(node, cell=_nearest_to_centroid(pixels), pixels=frozenset(pixels))

    def trace(start, first):
        chain = [start, first]
        visited[first] = True
        previous, current = start, first
        while True:
            following = None
            for d_row, d_col in utils.NEIGHBOR_OFFSETS:
                row, col = current[0] + d_row, current[1] + d_col
                if 0 <= row < height and 0 <= col < width and mask[row, col] \
                        and (row, col) != previous:
                    following = (row, col)
                    break
            if following is None:
                return chain, None
            chain.append(following)
            if node_of[following] >= 0:
                return chain, int(node_of[following])
            if visited[following]:
                return chain, None
            visited[following] = True
            previous, current = current, following

    def trace_from(node):
        for pixel in sorted(graph.nodes[node]['pixels']):
            for d_row, d_col in utils.NEIGHBOR_OFFSETS:
                row, col = pixel[0] + d_row, pixel[1] + d_col
                if not (0 <= row < height and 0 <= col < width):
                    continue
                if not mask[row, col] or node_of[row, col] >= 0 or visited[row, col]:
                    continue
                chain, end = trace(pixel, (row, col))
                if end is None:
                    _logger.debug('dropped open chain', extra={'event': 'open_chain', 'start': pixel})
                    continue
                _add_chain(graph, node, end, chain, skel.resolution)

    for node in range(count):
        trace_from(node)

    # loops without any node pixel
    for row, col in np.argwhere(mask & ~node_pixels):
        if visited[row, col]:
            continue
        node = graph.number_of_nodes()
        pixel = (int(row), int(col))
        node_of[pixel] = node
        visited[pixel] = True
        graph.add_node(node, cell=pixel, pixels=frozenset([pixel]))
        trace_from(node)

    return RawGraph(graph, skel.resolution, skel.origin, mask.shape)


def _frontier_test(frontier, resolution, radius):
    if frontier is None or not np.any(frontier):
        return lambda cell: False
    distance = ndimage.distance_transform_edt(~np.asarray(frontier, dtype=bool)) * resolution
    return lambda cell: bool(distance[cell[0], cell[1]] <= radius + _EPS)


def _merge_junctions(graph, radius, resolution):
    close = nx.Graph()
    for u, v, data in graph.edges(data=True):
        if u != v and data['length'] <= radius + _EPS \
                and graph.degree(u) >= 3 and graph.degree(v) >= 3:
            close.add_edge(u, v)
    groups = sorted((sorted(group) for group in nx.connected_components(close)), key=lambda g: g[0])
    for group in groups:
        keep, members = group[0], set(group)
        pixels = set()
        for node in group:
            pixels |= graph.nodes[node]['pixels']
        rehomed = []
        for node in group:
            for _, other, data in list(graph.edges(node, data=True)):
                if other in members and data['length'] <= radius + _EPS and other != node:
                    pixels.update(data['chain'])
                    continue
                rehomed.append((node, other, data))
        centroid = np.mean([graph.nodes[n]['cell'] for n in group], axis=0)
        ordered = sorted(pixels)
        points = np.array(ordered, dtype=float)
        cell = ordered[int(np.argmin(((points - centroid) ** 2).sum(axis=1)))]
        graph.remove_nodes_from(group)
        graph.add_node(keep, cell=cell, pixels=frozenset(pixels))
        seen = set()
        for node, other, data in rehomed:
            # an edge between two members shows up once from each end
            identity = (data['chain'], data['ends'])
            if identity in seen:
                continue
            seen.add(identity)
            chain = _oriented(data, node)
            end = keep if other in members else other
            graph.add_edge(keep, end, chain=chain, ends=(keep, end), length=data['length'])
        _logger.debug('merged junctions', extra={'event': 'merge', 'nodes': group})
    return bool(groups)


def _prune_forks(graph, min_length, near_frontier):
    changed = False
    for node in sorted(graph.nodes):
        if node not in graph or graph.degree(node) != 1:
            continue
        (_, other, data), = graph.edges(node, data=True)
        if other == node or graph.degree(other) < 3:
            continue
        if data['length'] >= min_length or near_frontier(graph.nodes[node]['cell']):
            continue
        graph.remove_node(node)
        changed = True
    return changed


def _dissolve(graph, resolution):
    changed = False
    for node in sorted(graph.nodes):
        if node not in graph or graph.degree(node) != 2:
            continue
        incident = list(graph.edges(node, data=True))
        if len(incident) != 2 or any(other == node for _, other, _ in incident):
            continue
        (_, a, first), (_, b, second) = incident
        head = _oriented(first, a)
        tail = _oriented(second, node)
        length = first['length'] + second['length'] + _step_cost(head[-1], tail[0], resolution)
        chain = head + tail[1:] if head[-1] == tail[0] else head + tail
        graph.remove_node(node)
        graph.add_edge(a, b, chain=chain, ends=(a, b), length=length)
        changed = True
    return changed


def reduce_graph(raw, params=None, frontier=None):
    """Merge nearby junctions, prune short forks and dissolve pass-through nodes.

    Junctions (degree >= 3) joined by an edge no longer than
    ``params.merge_radius`` collapse into one node. A degree-1 branch shorter
    than ``params.fork_min_len`` hanging off a junction is deleted unless its
    tip lies within ``params.frontier_radius`` of ``frontier``. Nodes left with
    two edges are folded into a single edge. Repeats until nothing changes.

    Args:
        raw (RawGraph): Output of :func:`extract_graph`.
        params (ReduceParams): Thresholds; defaults apply when None.
        frontier (numpy.ndarray or None): Boolean frontier mask shaped like
            the skeleton; None disables the frontier exemption.

    Returns:
        RawGraph: A new reduced graph. ``raw`` is not modified.
    """
    params = params or ReduceParams()
    reduced = raw.copy()
    graph = reduced.graph
    near_frontier = _frontier_test(frontier, raw.resolution, params.frontier_radius)
    for _ in range(graph.number_of_nodes() + 1):
        changed = _merge_junctions(graph, params.merge_radius, raw.resolution)
        changed |= _prune_forks(graph, params.fork_min_len, near_frontier)
        changed |= _dissolve(graph, raw.resolution)
        if not changed:
            break
    return reduced


@dataclass(frozen=True, eq=False)
class ClassifiedRVG:
    """A reduced graph with a role per node."""
    graph: RawGraph
    roles: dict
    agent_node: int

    @property
    def nodes(self):
        """``(id, cell, role)`` triples ordered by id."""
        return [(node, self.graph.cell(node), self.roles[node]) for node in self.graph.nodes]

    def with_role(self, role):
        return sorted(node for node, value in self.roles.items() if value is role)

    @property
    def neighbors(self):
        return self.with_role(Role.NEIGHBOR)

    @property
    def exploratory(self):
        return self.with_role(Role.EXPLORATORY)

    def cell(self, node):
        return self.graph.cell(node)

    def position(self, node):
        return self.graph.position(node)


def classify_nodes(graph, pose, semantic_map, params=None):
    """Label every node AGENT, NEIGHBOR, EXPLORATORY or ORDINARY.

    The agent node is the node nearest to ``pose`` (ties: lowest id); its
    graph neighbors are NEIGHBOR nodes; other degree-1 nodes within
    ``params.frontier_radius`` of a frontier cell are EXPLORATORY.

    Raises:
        EmptySkeleton: If ``graph`` has no node.
    """
    params = params or ReduceParams()
    if not len(graph):
        raise EmptySkeleton('graph has no nodes')

    def distance(node):
        x, y = graph.position(node)
        return (x - pose[0]) ** 2 + (y - pose[1]) ** 2

    agent = min(graph.nodes, key=lambda node: (distance(node), node))
    neighbors = set(graph.neighbors(agent))
    near_frontier = _frontier_test(frontier_cells(semantic_map), graph.resolution,
                                   params.frontier_radius)
    roles = {}
    for node in graph.nodes:
        if node == agent:
            roles[node] = Role.AGENT
        elif node in neighbors:
            roles[node] = Role.NEIGHBOR
        elif graph.degree(node) == 1 and near_frontier(graph.cell(node)):
            roles[node] = Role.EXPLORATORY
        else:
            roles[node] = Role.ORDINARY
    return ClassifiedRVG(graph=graph, roles=roles, agent_node=agent)


class ExploratoryPath(typing.NamedTuple):
    cells: tuple
    length: float
    exploratory_node: int
    neighbor: typing.Optional[int]


class PathSet(typing.NamedTuple):
    paths: tuple

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def through(self, neighbor):
        return [path for path in self.paths if path.neighbor == neighbor]


def _first_neighbor(rvg, owners, cells):
    agent = rvg.agent_node
    for cell in cells:
        owner = owners.get(cell)
        if owner is None:
            continue
        kind, ident = owner
        if kind == 'edge' and agent in ident and ident[0] != ident[1]:
            return ident[1] if ident[0] == agent else ident[0]
        if kind == 'node' and rvg.roles.get(ident) is Role.NEIGHBOR:
            return ident
    return None


def exploratory_paths(rvg, skel):
    """Shortest skeleton paths from the agent node to every reachable exploratory node.

    Uniform-cost expansion over skeleton pixels with axis steps costing
    ``res`` and diagonal steps ``sqrt(2) * res``. Each path is tagged with the
    first NEIGHBOR node it passes.
    """
    targets = rvg.exploratory
    if not targets:
        return PathSet(())
    graph, index = utils.grid_graph(skel.mask, skel.resolution)
    cells = [tuple(int(v) for v in cell) for cell in np.argwhere(skel.mask)]
    source = index[rvg.cell(rvg.agent_node)]
    if source < 0:
        return PathSet(())
    distances, predecessors = csgraph.dijkstra(graph, directed=False, indices=source,
                                               return_predecessors=True)
    owners = rvg.graph.pixel_owners()
    paths = []
    for node in targets:
        current = index[rvg.cell(node)]
        if current < 0 or not np.isfinite(distances[current]):
            continue
        sequence = [current]
        while current != source:
            current = predecessors[current]
            sequence.append(current)
        chain = tuple(cells[i] for i in reversed(sequence))
        paths.append(ExploratoryPath(cells=chain, length=float(distances[index[rvg.cell(node)]]),
                                     exploratory_node=node,
                                     neighbor=_first_neighbor(rvg, owners, chain)))
    return PathSet(tuple(paths))


def graph_to_dot(rvg):
    """Render a classified graph as DOT text."""
    nodes = [{'id': node, 'row': cell[0], 'col': cell[1], 'role': role.value}
             for node, cell, role in rvg.nodes]
    edges = [{'u': u, 'v': v, 'length': round(data['length'], 3)}
             for u, v, data in rvg.graph.edges()]
    template = jinja2.Template(loading.load_template('graph_dot'), trim_blocks=True, lstrip_blocks=True)
    return template.render(nodes=nodes, edges=edges) + '\n'
