"""Episode traces: the records one episode produces, their JSON Lines files and map renders.

A trace file holds one JSON object per line: an ``episode`` header, the
``step`` and ``decision`` records in the order they happened, then an
``outcome`` record. Keys are sorted and floats rounded to
``config.trace_float_precision`` places so equal episodes give equal files.
"""

import json
import logging
import typing
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import config as cf
from . import constants as cn
from . import gridworld
from . import schemas
from .exceptions import ParseError, ValidationError
from .semantic_map import SemanticMap, integrate


_logger = logging.getLogger(__name__)


def _rounded(obj, digits):
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return round(value, digits) + 0.0 if np.isfinite(value) else value
    if isinstance(obj, dict):
        return {key: _rounded(value, digits) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(value, digits) for value in obj]
    return obj


@dataclass
class EpisodeTrace:
    """Everything recorded about one episode.

    ``steps`` and ``decisions`` hold plain record dicts. A decision taken
    after ``k`` actions carries ``step == k`` and precedes the record of
    step ``k + 1`` in the file.
    """
    scene: str
    method: str
    goal: str
    seed: int = 0
    backend: str = cn.BACKENDS.MOCK
    config: dict = field(default_factory=dict)
    scene_path: typing.Optional[str] = None
    steps: list = field(default_factory=list)
    decisions: list = field(default_factory=list)
    outcome: typing.Optional[dict] = None

    def header(self):
        keys = cn.EPISODE_KEYS
        return {
            keys.TYPE: cn.RECORD_TYPES.EPISODE,
            keys.SCHEMA_VERSION: cf.trace_schema_version,
            keys.SCENE: self.scene,
            keys.SCENE_PATH: self.scene_path,
            keys.METHOD: self.method,
            keys.SEED: self.seed,
            keys.GOAL: self.goal,
            keys.BACKEND: self.backend,
            keys.CONFIG: self.config,
        }

    def add_step(self, step, pose, action, collision):
        record = {
            cn.STEP_KEYS.TYPE: cn.RECORD_TYPES.STEP,
            cn.STEP_KEYS.STEP: step,
            cn.STEP_KEYS.POSE: [pose[0], pose[1], pose[2]],
            cn.STEP_KEYS.ACTION: gridworld.parse_action(action).value,
            cn.STEP_KEYS.COLLISION: bool(collision),
        }
        self.steps.append(record)
        return record

    def add_decision(self, step, subgoal_kind, chosen=None, **fields):
        """Append a decision record; unspecified fields get empty values."""
        keys = cn.DECISION_KEYS
        record = {
            keys.TYPE: cn.RECORD_TYPES.DECISION,
            keys.STEP: step,
            keys.AGENT_NODE: None,
            keys.NODE_COUNT: 0,
            keys.EDGE_COUNT: 0,
            keys.NEIGHBORS: [],
            keys.EXPLORATORY: [],
            keys.PATH_PROMPT: None,
            keys.DECISION_PROMPT: None,
            keys.EXCHANGES: [],
            keys.FALLBACK: False,
            keys.P: [],
            keys.C: [],
            keys.L: [],
            keys.W: [],
            keys.CHOSEN: chosen,
            keys.SUBGOAL_KIND: subgoal_kind,
        }
        unknown = set(fields) - set(record)
        if unknown:
            raise KeyError(f'unknown decision fields: {sorted(unknown)}')
        record.update(fields)
        self.decisions.append(record)
        return record

    def finish(self, success, path_length, optimal_length, explored_area,
               collisions, forwards, steps, failure=None):
        keys = cn.OUTCOME_KEYS
        self.outcome = {
            keys.TYPE: cn.RECORD_TYPES.OUTCOME,
            keys.SUCCESS: bool(success),
            keys.PATH_LENGTH: float(path_length),
            keys.OPTIMAL_LENGTH: float(optimal_length),
            keys.EXPLORED_AREA: float(explored_area),
            keys.COLLISIONS: int(collisions),
            keys.FORWARDS: int(forwards),
            keys.STEPS: int(steps),
            keys.FAILURE: failure,
        }
        return self.outcome

    def _outcome(self, key):
        if self.outcome is None:
            raise ValueError('episode has no outcome yet')
        return self.outcome[key]

    @property
    def success(self):
        return self._outcome(cn.OUTCOME_KEYS.SUCCESS)

    @property
    def path_length(self):
        return self._outcome(cn.OUTCOME_KEYS.PATH_LENGTH)

    @property
    def optimal_length(self):
        return self._outcome(cn.OUTCOME_KEYS.OPTIMAL_LENGTH)

    @property
    def explored_area(self):
        return self._outcome(cn.OUTCOME_KEYS.EXPLORED_AREA)

    @property
    def collisions(self):
        return self._outcome(cn.OUTCOME_KEYS.COLLISIONS)

    @property
    def forwards(self):
        return self._outcome(cn.OUTCOME_KEYS.FORWARDS)

    @property
    def step_count(self):
        return self._outcome(cn.OUTCOME_KEYS.STEPS)

    @property
    def failure(self):
        return self._outcome(cn.OUTCOME_KEYS.FAILURE)

    @property
    def actions(self):
        return [record[cn.STEP_KEYS.ACTION] for record in self.steps]

    @property
    def prompts(self):
        """Every prompt sent to a scorer backend, in order."""
        return [exchange[cn.EXCHANGE_KEYS.PROMPT] for record in self.decisions
                for exchange in record[cn.DECISION_KEYS.EXCHANGES]]

    def records(self):
        """All records in file order."""
        timeline = [((record[cn.BASE_KEYS.STEP], 0), record) for record in self.steps]
        timeline += [((record[cn.BASE_KEYS.STEP], 1), record) for record in self.decisions]
        timeline.sort(key=lambda item: item[0])
        records = [self.header()] + [record for _, record in timeline]
        if self.outcome is not None:
            records.append(self.outcome)
        return records

    def to_jsonl(self):
        lines = []
        for record in self.records():
            record = _rounded(record, cf.trace_float_precision)
            if cf.validate_traces:
                validate_record(record)
            lines.append(json.dumps(record, sort_keys=True, cls=cf.json_encoder))
        return '\n'.join(lines) + '\n'


def validate_record(record):
    """Check ``record`` against the schema of its type.

    Raises:
        ValidationError: If the type is unknown or the record does not match.
    """
    try:
        schema = schemas.record_schemas[record[cn.BASE_KEYS.TYPE]]
    except (KeyError, TypeError) as err:
        raise ValidationError(f'record has no known type: {record!r}') from err
    try:
        schema.validate(record)
    except ValueError as err:
        raise ValidationError(str(err)) from err


def write_trace(trace, path):
    with open(path, 'w') as f:
        f.write(trace.to_jsonl())
    _logger.info('wrote trace', extra={'event': 'trace_written', 'path': path,
                                       'scene': trace.scene, 'method': trace.method})


def read_trace(path):
    """Load a trace file written by :func:`write_trace`.

    Raises:
        ParseError: If a line is not JSON or the header is missing.
        ValidationError: If a record does not match its schema.
    """
    try:
        with open(path) as f:
            lines = [line for line in f if line.strip()]
    except OSError as err:
        raise ParseError(f'cannot read {path}: {err}') from err
    try:
        records = [json.loads(line) for line in lines]
    except ValueError as err:
        raise ParseError(f'{path}: {err}') from err
    if not records or records[0].get(cn.BASE_KEYS.TYPE) != cn.RECORD_TYPES.EPISODE:
        raise ParseError(f'{path}: first record is not an episode header')
    for record in records:
        validate_record(record)
    header = records[0]
    keys = cn.EPISODE_KEYS
    trace = EpisodeTrace(scene=header[keys.SCENE], method=header[keys.METHOD], goal=header[keys.GOAL],
                         seed=header[keys.SEED], backend=header[keys.BACKEND],
                         config=header[keys.CONFIG], scene_path=header[keys.SCENE_PATH])
    for record in records[1:]:
        kind = record[cn.BASE_KEYS.TYPE]
        if kind == cn.RECORD_TYPES.STEP:
            trace.steps.append(record)
        elif kind == cn.RECORD_TYPES.DECISION:
            trace.decisions.append(record)
        elif kind == cn.RECORD_TYPES.OUTCOME:
            trace.outcome = record
        else:
            raise ParseError(f'{path}: unexpected second header')
    return trace


def replay(trace, scene, upto=None):
    """Rebuild the semantic map of ``trace`` after ``upto`` steps.

    Returns:
        tuple: ``(semantic_map, poses)`` with the poses visited so far.

    Raises:
        ValidationError: If the replayed poses drift from the recorded ones,
            i.e. the trace was not produced on ``scene``.
    """
    params = cf.PlannerConfig.from_dict(trace.config) if trace.config else cf.PlannerConfig()
    steps = trace.steps if upto is None else trace.steps[:upto]
    state = gridworld.initial_state(scene)
    semantic_map = SemanticMap.for_scene(scene)
    integrate(semantic_map, gridworld.observe(state, scene, depth_range=params.depth_range), state.pose)
    for record in steps:
        state = gridworld.step(state, scene, record[cn.STEP_KEYS.ACTION], agent_radius=params.agent_radius)
        recorded = record[cn.STEP_KEYS.POSE]
        if not np.allclose(state.pose, recorded, atol=10 ** -(cf.trace_float_precision - 1)):
            raise ValidationError(f'step {record[cn.STEP_KEYS.STEP]}: replayed pose {tuple(state.pose)} '
                                  f'differs from recorded {recorded}')
        if state.done:
            break
        integrate(semantic_map, gridworld.observe(state, scene, depth_range=params.depth_range), state.pose)
    return semantic_map, list(state.history)


_UNKNOWN = (200, 200, 200)
_FREE = (255, 255, 255)
_OBSTACLE = (40, 40, 40)
_OBJECT = (90, 160, 90)
_GOAL = (220, 40, 40)
_PATH = (40, 90, 220)
_AGENT = (250, 170, 0)


def _layers(semantic_map, poses, goal):
    path = np.zeros(semantic_map.shape, dtype=bool)
    for pose in poses:
        cell = semantic_map.pose_cell(pose)
        if semantic_map.in_bounds(cell):
            path[cell] = True
    objects = semantic_map.categories.any(axis=0)
    goal_mask = np.zeros(semantic_map.shape, dtype=bool)
    if goal is not None:
        try:
            goal_mask = semantic_map.category_mask(semantic_map.category_id(goal))
        except KeyError:
            pass
    agent = semantic_map.pose_cell(poses[-1]) if poses else None
    return path, objects, goal_mask, agent


def render_image(semantic_map, poses=(), goal=None):
    """RGB array of the map with the visited path and the agent drawn on top."""
    path, objects, goal_mask, agent = _layers(semantic_map, poses, goal)
    image = np.empty(semantic_map.shape + (3,), dtype=np.uint8)
    image[:] = _UNKNOWN
    image[semantic_map.explored] = _FREE
    image[semantic_map.obstacle] = _OBSTACLE
    image[objects] = _OBJECT
    image[goal_mask] = _GOAL
    image[path] = _PATH
    if agent is not None and semantic_map.in_bounds(agent):
        image[agent] = _AGENT
    return image


def render_ascii(semantic_map, poses=(), goal=None):
    """Text picture of the map, one character per cell."""
    path, objects, goal_mask, agent = _layers(semantic_map, poses, goal)
    chars = np.full(semantic_map.shape, ' ')
    chars[semantic_map.explored] = '.'
    chars[semantic_map.obstacle] = '#'
    chars[objects] = 'o'
    chars[goal_mask] = 'G'
    chars[path] = '*'
    if agent is not None and semantic_map.in_bounds(agent):
        chars[agent] = '@'
    return '\n'.join(''.join(row) for row in chars) + '\n'


def write_image(image, path):
    """Save an RGB array; the format follows the extension (``.ppm``, ``.png``)."""
    Image.fromarray(image).save(path)
    _logger.info('wrote map render', extra={'event': 'render', 'path': path})
    return path
