"""Configuration options.

Module level attributes are global options read at call time, so they can be
changed by assignment, e.g. ``voronav.config.validate_traces = True``. Planner
thresholds live on :class:`PlannerConfig`.
"""

import dataclasses
import os
import typing

from . import constants as cn
from .exceptions import ValidationError
from .utils import AppEncoder

# JSON encoder used to serialize trace records.
json_encoder = AppEncoder

# Version stamped on the first record of every trace file.
trace_schema_version = '1.0'

# Decimal places kept for floats written to traces.
trace_float_precision = 6

# Validate every trace record against its schema before writing.
validate_traces = False

# Default upper bound on concurrent requests to a remote scorer.
remote_max_in_flight = 4

# Environment variables read by the remote scorer.
LLM_URL_ENV = 'VORONAV_LLM_URL'
LLM_KEY_ENV = 'VORONAV_LLM_KEY'
LLM_MODEL_ENV = 'VORONAV_LLM_MODEL'


@dataclasses.dataclass(frozen=True)
class ReduceParams:
    """Thresholds used to reduce the raw skeleton graph, in meters."""
    merge_radius: float = 0.4
    fork_min_len: float = 0.5
    frontier_radius: float = 0.3

    def __post_init__(self):
        _check_positive(self, ('merge_radius', 'fork_min_len', 'frontier_radius'))


@dataclasses.dataclass(frozen=True)
class PlannerConfig:
    """Planner settings shared by every navigator.

    Distances are in meters. ``use_path_desc`` and ``use_farsight`` switch the
    two text descriptions on and off for ablation runs.
    """
    use_path_desc: bool = True
    use_farsight: bool = True
    success_radius: float = 0.1
    subgoal_reach: float = 0.25
    history_radius: float = 0.5
    # None stands the agent as close as it fits: agent_radius plus one cell
    view_point_radius: typing.Optional[float] = None
    corridor_min: float = 1.5
    depth_range: float = cn.DEPTH_RANGE_M
    agent_radius: float = cn.AGENT_RADIUS_M
    max_steps: int = 500
    stuck_collisions: int = 3
    frontier_min_cluster: int = 3
    seed: int = 0
    rvg: ReduceParams = dataclasses.field(default_factory=ReduceParams)

    def __post_init__(self):
        _check_positive(self, ('success_radius', 'subgoal_reach', 'history_radius',
                               'view_point_radius', 'corridor_min', 'depth_range',
                               'agent_radius', 'max_steps', 'stuck_collisions',
                               'frontier_min_cluster'))

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        """Build a config from a (validated) mapping of overrides."""
        data = dict(data)
        rvg = data.pop('rvg', None)
        if rvg is not None:
            data['rvg'] = ReduceParams(**rvg)
        return cls(**data)


_OPTIONAL = {'view_point_radius'}


def _check_positive(obj, names):
    for name in names:
        value = getattr(obj, name)
        if name in _OPTIONAL and value is None:
            continue
        if value is None or not value > 0:
            raise ValidationError(f'{name} must be > 0, got {value!r}')


def load_config(path):
    """Load a :class:`PlannerConfig` from a ``.json`` or ``.toml`` file.

    Keys mirror the fields of :class:`PlannerConfig`; RVG thresholds go in a
    nested ``rvg`` table. Missing keys keep their defaults.

    Raises:
        ParseError: If the file cannot be parsed.
        ValidationError: If the file contains unknown keys or bad values.
    """
    from . import loading
    from . import schemas
    data = loading.load_file(path)
    try:
        schemas.planner_config.validate(data)
    except ValueError as err:
        raise ValidationError(f'{path}: {err}') from err
    return PlannerConfig.from_dict(data)


def llm_settings():
    """Return ``(url, token, model)`` for the remote scorer from the environment."""
    return (os.environ.get(LLM_URL_ENV), os.environ.get(LLM_KEY_ENV),
            os.environ.get(LLM_MODEL_ENV))
