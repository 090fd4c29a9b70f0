"""Episode loop shared by every planner.

All navigators perceive, map and drive the same way; they differ only in
how they pick the next mid-term goal:

- :class:`VoroNavNavigator` scores the neighbors of the agent's Voronoi node
  with exploration, efficiency and language-model rewards.
- :class:`VoronoiNavigator` does the same with a constant semantic score.
- :class:`FrontierNavigator` heads for the nearest frontier cluster.
- :class:`RandomNavigator` heads for a random reachable frontier cell.
"""

import abc
import collections
import logging
import math
import typing

import numpy as np
from scipy import ndimage

from . import constants as cn
from . import describe, gridworld, policy, rvg, scorer, voronoi
from .config import PlannerConfig
from .exceptions import (DegenerateRay, EmptyFreeSpace, EmptySkeleton, MissingObservation,
                         NoNeighbors, UnreachableGoal)
from .gridworld import Action
from .semantic_map import SemanticMap, frontier_cells, integrate, unoccupied_mask
from .traces import EpisodeTrace


_logger = logging.getLogger(__name__)

_EIGHT = np.ones((3, 3), dtype=bool)
_EPS = 1e-9
# steps spent exploring after the mapped target turned out unreachable
RECOVERY_STEPS = 10
# subgoal choices allowed within one step before the agent just turns
MAX_RESELECT = 4
# field distance to the target below which a collision-free action sequence is searched
APPROACH_RANGE_M = 0.75
NEUTRAL_SCORE = 0.5


class Subgoal(typing.NamedTuple):
    kind: str
    cell: typing.Optional[tuple] = None
    node: typing.Optional[int] = None
    frontier: typing.Optional[tuple] = None


class Frontier(typing.NamedTuple):
    cells: object
    distance: object
    landing: object


class Graph(typing.NamedTuple):
    """Voronoi products of one map version."""
    free: object
    skeleton: object
    reduced: object
    distance: object


class BaseNavigator(abc.ABC):
    """One episode of object search on ``scene``.

    Args:
        scene (Scene): The world to search.
        config (PlannerConfig or None): Planner settings.
        backend (BaseScorer or None): Scorer for semantic rewards.
        scene_path (str or None): Recorded in the trace header.
    """
    method = None
    # LookAround before every decision, not only at the start
    look_around_at_decisions = False

    def __init__(self, scene, config=None, backend=None, scene_path=None):
        self.scene = scene
        self.config = config or PlannerConfig()
        self.backend = backend
        self.map = SemanticMap.for_scene(scene)
        self.state = gridworld.initial_state(scene)
        self.rng = np.random.default_rng(self.config.seed)
        self.trace = EpisodeTrace(
            scene=scene.name, method=self.method, goal=scene.goal_name, seed=self.config.seed,
            backend=getattr(backend, 'kind', None) or cn.BACKENDS.MOCK,
            config=self.config.to_dict(), scene_path=scene_path)

        self.subgoal = None
        self.blocked = np.zeros(self.map.shape, dtype=bool)
        self.unblocked_at = None
        self.spent = np.zeros(self.map.shape, dtype=bool)
        self.rejected = np.zeros(self.map.shape, dtype=bool)
        self.approach = collections.deque()
        self.settle_turns = 0
        self.collision_map = np.zeros(self.map.shape, dtype=bool)
        self.collisions_in_row = 0
        self.decision_points = []
        self.target_seen = False
        self.recover_until = -1
        self.exhausted = False

        self.pending = collections.deque()
        self.capturing = False
        self.panorama = []
        self.panorama_fresh = False
        self.looked_around = False

        self._field_key = None
        self._field = None
        self._graph_version = None
        self._graph = None
        self._success_version = None
        self._success = None
        self._target_key = None
        self._target = None

    @property
    def agent_cell(self):
        return self.map.pose_cell(self.state.pose)

    @property
    def step_count(self):
        return self.state.step_count

    def log_extra(self, event, **fields):
        return dict(event=event, scene=self.scene.name, method=self.method,
                    seed=self.config.seed, step=self.step_count, **fields)

    def run(self):
        """Play the episode to the end and return its :class:`EpisodeTrace`."""
        _logger.info('episode start', extra=self.log_extra('episode_start', goal=self.scene.goal_name))
        self.observe()
        while not self.state.done and self.step_count < self.config.max_steps:
            self.apply(self.next_action())
        return self.finish()

    def observe(self):
        obs = gridworld.observe(self.state, self.scene, depth_range=self.config.depth_range)
        integrate(self.map, obs, self.state.pose)
        if not self.target_seen and self.map.category_mask(self.scene.goal).any():
            self.target_seen = True
            _logger.info('target mapped', extra=self.log_extra('target_seen'))
        return obs

    def apply(self, action):
        self.state = gridworld.step(self.state, self.scene, action, agent_radius=self.config.agent_radius)
        self.trace.add_step(self.step_count, self.state.pose, action, self.state.last_collision)
        if self.state.done:
            return
        obs = self.observe()
        if self.capturing:
            self.panorama.append(obs)
        if action is Action.MOVE_FORWARD:
            if self.state.last_collision:
                self.collisions_in_row += 1
                self.approach.clear()
                self.mark_collision()
            else:
                self.collisions_in_row = 0
                self.panorama_fresh = False

    def mark_collision(self):
        """Block the map cell just ahead of the agent; bumps reveal what the camera missed."""
        pose = self.state.pose
        reach = self.config.agent_radius + self.map.resolution
        heading = math.radians(pose.heading)
        cell = self.map.world_to_cell(pose.x + reach * math.cos(heading), pose.y + reach * math.sin(heading))
        if self.map.in_bounds(cell) and cell != self.agent_cell:
            self.collision_map[cell] = True

    def look_around(self):
        """Queue a full turn in place and return its first action."""
        self.pending.extend([Action.TURN_RIGHT] * cn.LOOKAROUND_TURNS)
        self.capturing = True
        self.panorama = []
        _logger.debug('look around', extra=self.log_extra('look_around'))
        return self.pending.popleft()

    @property
    def chasing_target(self):
        return self.target_seen and self.step_count >= self.recover_until

    def next_action(self):
        if self.capturing and (not self.pending or self.chasing_target):
            self.pending.clear()
            self.capturing = False
            self.panorama_fresh = len(self.panorama) == cn.LOOKAROUND_TURNS
        if self.pending:
            return self.pending.popleft()
        if self.chasing_target:
            action = self.toward_target()
            if action is not None:
                return action
            self.recover_until = self.step_count + RECOVERY_STEPS
            self.subgoal = None
        if not self.looked_around:
            self.looked_around = True
            return self.look_around()
        return self.explore()

    def success_cells(self):
        """Map cells where Stop succeeds judging only by what has been observed.

        Unexplored cells count as solid, so every cell accepted here is also
        a success cell of the scene itself.
        """
        if self._success_version != self.map.version:
            cfg = self.config
            solid = self.map.obstacle | ~self.map.explored
            self._success = gridworld.success_mask(solid, self.map.category_mask(self.scene.goal),
                                                   self.map.resolution, cfg.success_radius,
                                                   cfg.view_point_radius, cfg.agent_radius)
            self._success_version = self.map.version
        return self._success

    def target_cells(self):
        """Success cells with unexplored space taken as free, minus cells ruled out on arrival."""
        key = (int(self.map.obstacle.sum()), int(self.collision_map.sum()))
        if self._target_key != key:
            cfg = self.config
            self._target = gridworld.success_mask(self.map.obstacle | self.collision_map,
                                                  self.map.category_mask(self.scene.goal),
                                                  self.map.resolution, cfg.success_radius,
                                                  cfg.view_point_radius, cfg.agent_radius)
            self._target_key = key
        return self._target & ~self.rejected

    def toward_target(self):
        if self.success_cells()[self.agent_cell]:
            return Action.STOP
        if self.subgoal is None or self.subgoal.kind != cn.SUBGOAL_KINDS.TARGET:
            self.subgoal = Subgoal(cn.SUBGOAL_KINDS.TARGET)
            self.approach.clear()
            self.settle_turns = 0
            self.trace.add_decision(self.step_count, cn.SUBGOAL_KINDS.TARGET)
            _logger.info('heading for target', extra=self.log_extra('decision', kind='target'))
        if self.approach:
            return self.approach.popleft()
        targets = self.target_cells()
        reachable = targets & policy.traversable_mask(self.map, self.config.agent_radius,
                                                      blocked=self.collision_map)
        key = (cn.SUBGOAL_KINDS.TARGET, int(self.rejected.sum()))
        try:
            field = self.field(key, reachable if reachable.any() else targets)
            if field.values[self.agent_cell] <= APPROACH_RANGE_M + _EPS:
                plan = policy.approach_plan(self.state.pose, self.success_cells(),
                                            self.map.obstacle | self.collision_map, self.map.resolution,
                                            self.map.origin, self.config.agent_radius)
                if plan:
                    _logger.debug('final approach', extra=self.log_extra('approach', actions=len(plan)))
                    self.approach.extend(plan[1:])
                    return plan[0]
            action = policy.local_action(field, self.state)
        except UnreachableGoal:
            _logger.info('mapped target unreachable', extra=self.log_extra('target_unreachable'))
            return None
        if action is Action.STOP:
            return self.settle()
        return action

    def settle(self):
        """Turn in place on a target cell the map cannot confirm yet; give the cell up after a full turn."""
        self.settle_turns += 1
        if self.settle_turns >= cn.LOOKAROUND_TURNS:
            self.rejected[self.agent_cell] = True
            self.settle_turns = 0
            _logger.debug('target cell rejected', extra=self.log_extra('settle', cell=self.agent_cell))
        return Action.TURN_RIGHT

    def field(self, key, goal):
        """Fast-marching field toward ``goal``, reused while obstacles stay the same."""
        key = (key, int(self.map.obstacle.sum()), int(self.collision_map.sum()))
        if key != self._field_key:
            self._field = policy.fmm_field(self.map, goal, self.config.agent_radius, blocked=self.collision_map)
            self._field_key = key
        field = self._field
        if not np.isfinite(field.values[self.agent_cell]):
            # agent inside the dilated band; solve again with its neighborhood cleared
            field = policy.fmm_field(self.map, goal, self.config.agent_radius,
                                     agent_cell=self.agent_cell, blocked=self.collision_map)
        return field

    def drive(self, key, goal):
        """Local action toward ``goal``."""
        return policy.local_action(self.field(key, goal), self.state)

    def subgoal_reached(self):
        if self.subgoal is None or self.subgoal.cell is None:
            return False
        x, y = self.map.cell_to_world(self.subgoal.cell)
        return math.hypot(x - self.state.pose.x, y - self.state.pose.y) <= self.config.subgoal_reach + _EPS

    def block(self, subgoal):
        """Keep ``subgoal`` and its surroundings out of choices until the next subgoal is reached."""
        if subgoal is None or subgoal.cell is None:
            return
        rows, cols = np.ogrid[:self.map.size, :self.map.size]
        radius = self.config.subgoal_reach / self.map.resolution
        for cell in {subgoal.cell, subgoal.frontier or subgoal.cell}:
            self.blocked |= (rows - cell[0]) ** 2 + (cols - cell[1]) ** 2 <= radius ** 2 + _EPS

    def explore(self):
        if self.subgoal is not None and self.subgoal.kind == cn.SUBGOAL_KINDS.TARGET:
            self.subgoal = None
            self.approach.clear()
        for _ in range(MAX_RESELECT):
            if self.subgoal is not None and self.subgoal_reached():
                self.on_reached(self.subgoal)
            if self.subgoal is None or self.needs_decision():
                if self.look_around_at_decisions and not self.panorama_fresh:
                    return self.look_around()
                self.subgoal = self.choose_subgoal()
                if self.subgoal is None:
                    if self.blocked.any() and self.state.pose != self.unblocked_at:
                        # blocked areas get another chance once the agent has moved
                        self.unblocked_at = self.state.pose
                        self.blocked[:] = False
                        continue
                    self.exhausted = True
                    _logger.info('nothing left to explore', extra=self.log_extra('exhausted'))
                    return Action.STOP
            if self.collisions_in_row >= self.config.stuck_collisions:
                _logger.info('stuck, dropping subgoal',
                             extra=self.log_extra('collision_recovery', subgoal=self.subgoal.cell))
                self.collisions_in_row = 0
                self.block(self.subgoal)
                self.subgoal = None
                continue
            try:
                action = self.drive((self.subgoal.kind, self.subgoal.cell), [self.subgoal.cell])
            except UnreachableGoal:
                self.block(self.subgoal)
                self.subgoal = None
                continue
            if action is Action.STOP:
                self.on_reached(self.subgoal)
                continue
            return action
        return Action.TURN_RIGHT

    def on_reached(self, subgoal):
        """Lift the blocks of the last decision round; a frontier still unresolved on arrival is spent."""
        if subgoal.frontier is not None and frontier_cells(self.map)[subgoal.frontier]:
            self.spent[subgoal.frontier] = True
        self.blocked[:] = False
        self.subgoal = None

    def needs_decision(self):
        return False

    @abc.abstractmethod
    def choose_subgoal(self):
        """Return the next :class:`Subgoal`, or None when nothing is left to explore."""

    def reachable_frontier(self):
        """Frontier cells the agent can get next to, with where to stand and how far that is.

        A frontier cell counts when it lies within ``agent_radius + res`` of a
        cell the fast-marching field from the agent reaches, so frontier
        cells inside the obstacle dilation band stay selectable.

        Returns:
            Frontier: ``cells`` is a boolean mask; ``landing`` and ``distance``
                are only meaningful on those cells.
        """
        frontier = frontier_cells(self.map) & ~self.blocked & ~self.spent
        if not frontier.any():
            return Frontier(frontier, None, None)
        field = policy.fmm_field(self.map, [self.agent_cell], self.config.agent_radius,
                                 agent_cell=self.agent_cell, blocked=self.collision_map)
        finite = np.isfinite(field.values)
        gap, (rows, cols) = ndimage.distance_transform_edt(~finite, return_indices=True)
        gap = gap * self.map.resolution
        cells = frontier & (gap <= self.config.agent_radius + self.map.resolution + _EPS)
        distance = np.where(cells, field.values[rows, cols] + gap, np.inf)
        return Frontier(cells, distance, (rows, cols))

    def frontier_subgoal(self, frontier, cell):
        landing = (int(frontier.landing[0][cell]), int(frontier.landing[1][cell]))
        return Subgoal(cn.SUBGOAL_KINDS.FRONTIER, landing, frontier=cell)

    def nearest_frontier(self):
        frontier = self.reachable_frontier()
        if not frontier.cells.any():
            return None
        cell = np.unravel_index(int(np.argmin(frontier.distance)), frontier.distance.shape)
        return self.frontier_subgoal(frontier, tuple(int(v) for v in cell))

    def record_frontier_decision(self, subgoal, **fields):
        if subgoal is not None:
            self.trace.add_decision(self.step_count, cn.SUBGOAL_KINDS.FRONTIER, **fields)
            _logger.info('heading for frontier', extra=self.log_extra('decision', kind='frontier',
                                                                      cell=subgoal.frontier))
        return subgoal

    def finish(self):
        cfg = self.config
        state = self.state
        remaining = gridworld.distance_to_goal(self.scene, state.pose, cfg.view_point_radius, cfg.agent_radius)
        success = state.done and remaining < cfg.success_radius
        failure = None
        if not success:
            failure = cn.FAILURES.PLANNING if self.target_seen else cn.FAILURES.EXPLORATION
        optimal = gridworld.distance_to_goal(self.scene, self.scene.start_pose, cfg.view_point_radius,
                                             cfg.agent_radius)
        self.trace.finish(success=success, path_length=state.path_length, optimal_length=optimal,
                          explored_area=self.map.explored_area, collisions=state.collision_count,
                          forwards=state.forward_count, steps=state.step_count, failure=failure)
        _logger.info('episode end', extra=self.log_extra('episode_end', success=success, failure=failure,
                                                         exhausted=self.exhausted))
        return self.trace


class VoronoiNavigator(BaseNavigator):
    """Voronoi graph exploration without semantic scores."""
    method = cn.METHODS.VORONOI
    look_around_at_decisions = True

    def graph(self):
        """Skeleton, reduced graph and distance field of the current map, or None."""
        if self._graph_version != self.map.version:
            self._graph_version = self.map.version
            try:
                free = unoccupied_mask(self.map)
                skeleton = voronoi.skeletonize(free)
                raw = rvg.extract_graph(skeleton)
                reduced = rvg.reduce_graph(raw, self.config.rvg, frontier=frontier_cells(self.map))
                if not len(reduced):
                    raise EmptySkeleton('reduced graph has no nodes')
                self._graph = Graph(free, skeleton, reduced, voronoi.esdf(free))
            except (EmptyFreeSpace, EmptySkeleton) as err:
                _logger.debug('no voronoi graph', extra=self.log_extra('empty_graph', error=repr(err)))
                self._graph = None
        return self._graph

    def classified(self):
        graph = self.graph()
        if graph is None:
            return None
        return rvg.classify_nodes(graph.reduced, self.state.pose, self.map, self.config.rvg)

    def near_decision_points(self, position):
        return any(math.hypot(position[0] - x, position[1] - y) <= self.config.history_radius + _EPS
                   for x, y in self.decision_points)

    def needs_decision(self):
        if self.subgoal is None or self.subgoal.kind != cn.SUBGOAL_KINDS.NODE:
            return False
        classified = self.classified()
        if classified is None:
            return False
        x, y = classified.position(classified.agent_node)
        pose = self.state.pose
        return (math.hypot(x - pose.x, y - pose.y) <= self.config.subgoal_reach + _EPS
                and not self.near_decision_points((x, y)))

    def initial_subgoal(self, classified):
        """Nearest graph node, unless the agent already stands on it."""
        node = classified.agent_node
        x, y = classified.position(node)
        if math.hypot(x - self.state.pose.x, y - self.state.pose.y) <= self.config.subgoal_reach + _EPS:
            return None
        cell = classified.cell(node)
        if self.blocked[cell]:
            return None
        self.trace.add_decision(self.step_count, cn.SUBGOAL_KINDS.NODE, chosen=node,
                                agent_node=node, node_count=len(classified.graph),
                                edge_count=len(classified.graph.edges()))
        return Subgoal(cn.SUBGOAL_KINDS.NODE, cell, node)

    def choose_subgoal(self):
        classified = self.classified()
        if classified is None:
            return self.record_frontier_decision(self.nearest_frontier())
        if not self.decision_points:
            subgoal = self.initial_subgoal(classified)
            if subgoal is not None:
                self.decision_points.append((self.state.pose.x, self.state.pose.y))
                return subgoal
        self.decision_points.append((self.state.pose.x, self.state.pose.y))

        graph = self.graph()
        paths = rvg.exploratory_paths(classified, graph.skeleton)
        neighbors = classified.neighbors
        summary = dict(agent_node=classified.agent_node, node_count=len(classified.graph),
                       edge_count=len(classified.graph.edges()), neighbors=list(neighbors),
                       exploratory=list(classified.exploratory))
        if not neighbors:
            return self.record_frontier_decision(self.nearest_frontier(), **summary)
        P = policy.exploration_reward(classified, paths)
        C = policy.efficiency_reward(classified, self.state.history, self.config.history_radius)
        exclude = {node for node in neighbors if self.blocked[classified.cell(node)]}
        if not any(P) and not any(C):
            return self.record_frontier_decision(self.nearest_frontier(), P=P, C=C, **summary)
        L, notes = self.semantic_scores(classified, paths, graph)
        try:
            choice = policy.select_subgoal(P, C, L, classified, self.state.pose, exclude=exclude)
        except NoNeighbors:
            choice = cn.FRONTIER_FALLBACK
        bundle = policy.RewardBundle(tuple(neighbors), tuple(P), tuple(C), tuple(L))
        if choice == cn.FRONTIER_FALLBACK:
            return self.record_frontier_decision(self.nearest_frontier(), **summary,
                                                 **bundle.to_dict(), **notes)
        self.trace.add_decision(self.step_count, cn.SUBGOAL_KINDS.NODE, chosen=choice,
                                **summary, **bundle.to_dict(), **notes)
        _logger.info('chose waypoint', extra=self.log_extra('decision', kind='node', chosen=choice,
                                                            W=list(bundle.W)))
        return Subgoal(cn.SUBGOAL_KINDS.NODE, classified.cell(choice), choice)

    def semantic_scores(self, classified, paths, graph):
        """Return ``(L, trace fields)`` for the neighbors of the agent node."""
        return [NEUTRAL_SCORE] * len(classified.neighbors), {}


class VoroNavNavigator(VoronoiNavigator):
    """Voronoi graph exploration guided by language-model scores of each direction."""
    method = cn.METHODS.VORONAV

    def __init__(self, scene, config=None, backend=None, scene_path=None):
        super().__init__(scene, config, backend or scorer.MockScorer(), scene_path)

    def path_descriptions(self, classified, paths, graph):
        neighbors = classified.neighbors
        pose = self.state.pose
        objects = [describe.collect_path_objects(self.map, path, distance_field=graph.distance,
                                                 origin=(pose.x, pose.y),
                                                 corridor_min=self.config.corridor_min)
                   for path in paths]
        groups = describe.group_path_objects(neighbors, paths, objects)
        prompt = describe.render_path_prompt(groups, self.scene.goal_name)
        reply = scorer.summarize_paths(prompt, self.backend, n=len(neighbors))
        return prompt, reply

    def farsight_descriptions(self, classified):
        neighbors = classified.neighbors
        if not self.panorama:
            return [''] * len(neighbors)
        sectors = [obs.sector_heading for obs in self.panorama]
        try:
            assignments = describe.match_farsight(classified.cell(classified.agent_node),
                                                  [(node, classified.cell(node)) for node in neighbors],
                                                  sectors)
            return [describe.render_farsight_text(a, self.panorama, self.scene.labels) for a in assignments]
        except (DegenerateRay, MissingObservation) as err:
            _logger.warning('no farsight description', extra=self.log_extra('farsight', error=repr(err)))
            return [''] * len(neighbors)

    def semantic_scores(self, classified, paths, graph):
        cfg = self.config
        neighbors = classified.neighbors
        notes = {cn.DECISION_KEYS.EXCHANGES: [], cn.DECISION_KEYS.FALLBACK: False}
        path_text = [''] * len(neighbors)
        if cfg.use_path_desc:
            prompt, reply = self.path_descriptions(classified, paths, graph)
            path_text = reply.values
            notes[cn.DECISION_KEYS.PATH_PROMPT] = prompt
            notes[cn.DECISION_KEYS.EXCHANGES] += reply.exchanges
            notes[cn.DECISION_KEYS.FALLBACK] |= reply.fallback
        farsight_text = self.farsight_descriptions(classified) if cfg.use_farsight else [''] * len(neighbors)
        contexts = [describe.NeighborContext(node, path_description=path, farsight_description=far)
                    for node, path, far in zip(neighbors, path_text, farsight_text)]
        prompt = describe.render_decision_prompt(self.scene.goal_name, contexts,
                                                 use_path=cfg.use_path_desc, use_farsight=cfg.use_farsight)
        reply = scorer.score_neighbors(prompt, len(neighbors), self.backend)
        notes[cn.DECISION_KEYS.DECISION_PROMPT] = prompt
        notes[cn.DECISION_KEYS.EXCHANGES] += reply.exchanges
        notes[cn.DECISION_KEYS.FALLBACK] |= reply.fallback
        return reply.values, notes


class FrontierNavigator(BaseNavigator):
    """Nearest frontier cluster first."""
    method = cn.METHODS.FRONTIER

    def needs_decision(self):
        return self.subgoal is not None and not frontier_cells(self.map)[self.subgoal.frontier]

    def choose_subgoal(self):
        frontier = self.reachable_frontier()
        if not frontier.cells.any():
            return None
        clusters, count = ndimage.label(frontier_cells(self.map) & ~self.blocked & ~self.spent, structure=_EIGHT)
        best = None
        for label in range(1, count + 1):
            members = clusters == label
            if members.sum() < self.config.frontier_min_cluster:
                continue
            cells = np.argwhere(members & frontier.cells)
            if not len(cells):
                continue
            centroid = np.argwhere(members).mean(axis=0)
            cell = tuple(int(v) for v in cells[int(np.argmin(((cells - centroid) ** 2).sum(axis=1)))])
            if best is None or frontier.distance[cell] < frontier.distance[best]:
                best = cell
        if best is None:
            # only clusters below the size floor are left
            best = np.unravel_index(int(np.argmin(frontier.distance)), frontier.distance.shape)
            best = tuple(int(v) for v in best)
        return self.record_frontier_decision(self.frontier_subgoal(frontier, best))


class RandomNavigator(BaseNavigator):
    """A uniformly random reachable frontier cell each time."""
    method = cn.METHODS.RANDOM

    def needs_decision(self):
        return self.subgoal is not None and not frontier_cells(self.map)[self.subgoal.frontier]

    def choose_subgoal(self):
        frontier = self.reachable_frontier()
        cells = np.argwhere(frontier.cells)
        if not len(cells):
            return None
        cell = tuple(int(v) for v in cells[int(self.rng.integers(len(cells)))])
        return self.record_frontier_decision(self.frontier_subgoal(frontier, cell))


NAVIGATORS = {
    cn.METHODS.VORONAV: VoroNavNavigator,
    cn.METHODS.VORONOI: VoronoiNavigator,
    cn.METHODS.FRONTIER: FrontierNavigator,
    cn.METHODS.RANDOM: RandomNavigator,
}


def run_episode(scene, config=None, backend=None, method=cn.METHODS.VORONAV, scene_path=None):
    """Run one episode with the planner named by ``method`` and return its trace."""
    try:
        navigator = NAVIGATORS[method]
    except KeyError:
        raise ValueError(f'unknown method {method!r}') from None
    return navigator(scene, config, backend, scene_path).run()


def baseline_random(scene, config=None, **kwargs):
    return run_episode(scene, config, method=cn.METHODS.RANDOM, **kwargs)


def baseline_frontier(scene, config=None, **kwargs):
    return run_episode(scene, config, method=cn.METHODS.FRONTIER, **kwargs)


def baseline_voronoi(scene, config=None, **kwargs):
    return run_episode(scene, config, method=cn.METHODS.VORONOI, **kwargs)
