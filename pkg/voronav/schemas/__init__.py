"""Schema objects and the concrete schemas used by ``voronav``."""

from .objects import Array, Boolean, Integer, Number, Object, SchemaObject, String
from .schemas import (benchmark_suite, decision_record, episode_record, outcome_record,
                      planner_config, record_schemas, scene, step_record)

__all__ = [
    'Array', 'Boolean', 'Integer', 'Number', 'Object', 'SchemaObject', 'String',
    'benchmark_suite', 'decision_record', 'episode_record', 'outcome_record', 'planner_config',
    'record_schemas', 'scene', 'step_record',
]
