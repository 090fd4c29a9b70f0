"""Schemas of the scene format, config files and trace records."""

from .. import constants as cn
from ..utils import constant_values
from .objects import Array, Boolean, Integer, Number, Object, String


_positive = dict(exclusiveMinimum=0)
_probability = dict(minimum=0, maximum=1)

cell = Array('A (row, col) grid index.', item_type=Integer(),
             additional_params=dict(minItems=2, maxItems=2))
pose = Array('An (x, y, heading) pose.', item_type=Number(),
             additional_params=dict(minItems=3, maxItems=3))


scene = Object(
    'Scene file format.',
    properties={
        'name': String(),
        'resolution_m': Number(additional_params=_positive),
        'grid': Array(item_type=Array(item_type=Integer(additional_params=dict(minimum=cn.OBSTACLE))),
                      additional_params=dict(minItems=1)),
        'labels': Object(additional_properties_type=String()),
        'start': Object(properties={'x': Number(), 'y': Number(), 'heading_deg': Number()}),
        'targets': Array(
            item_type=Object(properties={
                'category': Integer(additional_params=dict(minimum=1)),
                'cells': Array(item_type=cell)})),
        'goal': String(),
    },
    required=['name', 'resolution_m', 'grid', 'labels', 'start', 'targets'],
    additional_properties_type=False,
)


rvg_config = Object(
    properties={
        'merge_radius': Number(additional_params=_positive),
        'fork_min_len': Number(additional_params=_positive),
        'frontier_radius': Number(additional_params=_positive),
    },
    required=[],
    additional_properties_type=False,
)


planner_config = Object(
    'Planner configuration file.',
    properties={
        'use_path_desc': Boolean(),
        'use_farsight': Boolean(),
        'success_radius': Number(additional_params=_positive),
        'subgoal_reach': Number(additional_params=_positive),
        'history_radius': Number(additional_params=_positive),
        'view_point_radius': Number(nullable=True, additional_params=_positive),
        'corridor_min': Number(additional_params=_positive),
        'depth_range': Number(additional_params=_positive),
        'agent_radius': Number(additional_params=_positive),
        'max_steps': Integer(additional_params=dict(minimum=1)),
        'stuck_collisions': Integer(additional_params=dict(minimum=1)),
        'frontier_min_cluster': Integer(additional_params=dict(minimum=1)),
        'seed': Integer(),
        'rvg': rvg_config,
    },
    required=[],
    additional_properties_type=False,
)


benchmark_suite = Object(
    'Seeded suite of generated scenes.',
    properties={
        'name': String(),
        'style': String(additional_params=dict(enum=['maze', 'apartment'])),
        'first_seed': Integer(additional_params=dict(minimum=0)),
        'count': Integer(additional_params=dict(minimum=1)),
        'size_m': Number(additional_params=_positive),
        'resolution_m': Number(additional_params=_positive),
        'max_steps': Integer(additional_params=dict(minimum=1)),
    },
    required=['name', 'style', 'first_seed', 'count', 'size_m', 'resolution_m'],
    additional_properties_type=False,
)


episode_record = Object(
    properties={
        cn.EPISODE_KEYS.TYPE: String(additional_params=dict(enum=[cn.RECORD_TYPES.EPISODE])),
        cn.EPISODE_KEYS.SCHEMA_VERSION: String(),
        cn.EPISODE_KEYS.SCENE: String(),
        cn.EPISODE_KEYS.SCENE_PATH: String(nullable=True),
        cn.EPISODE_KEYS.METHOD: String(additional_params=dict(enum=constant_values(cn.METHODS))),
        cn.EPISODE_KEYS.SEED: Integer(),
        cn.EPISODE_KEYS.GOAL: String(),
        cn.EPISODE_KEYS.BACKEND: String(additional_params=dict(enum=constant_values(cn.BACKENDS))),
        cn.EPISODE_KEYS.CONFIG: Object(additional_properties_type=True),
    },
)


step_record = Object(
    properties={
        cn.STEP_KEYS.TYPE: String(additional_params=dict(enum=[cn.RECORD_TYPES.STEP])),
        cn.STEP_KEYS.STEP: Integer(additional_params=dict(minimum=1)),
        cn.STEP_KEYS.POSE: pose,
        cn.STEP_KEYS.ACTION: String(),
        cn.STEP_KEYS.COLLISION: Boolean(),
    },
)


exchange = Object(properties={
    cn.EXCHANGE_KEYS.PROMPT: String(),
    cn.EXCHANGE_KEYS.RESPONSE: String(),
})


decision_record = Object(
    properties={
        cn.DECISION_KEYS.TYPE: String(additional_params=dict(enum=[cn.RECORD_TYPES.DECISION])),
        cn.DECISION_KEYS.STEP: Integer(additional_params=dict(minimum=0)),
        cn.DECISION_KEYS.AGENT_NODE: Integer(nullable=True),
        cn.DECISION_KEYS.NODE_COUNT: Integer(),
        cn.DECISION_KEYS.EDGE_COUNT: Integer(),
        cn.DECISION_KEYS.NEIGHBORS: Array(item_type=Integer()),
        cn.DECISION_KEYS.EXPLORATORY: Array(item_type=Integer()),
        cn.DECISION_KEYS.PATH_PROMPT: String(nullable=True),
        cn.DECISION_KEYS.DECISION_PROMPT: String(nullable=True),
        cn.DECISION_KEYS.EXCHANGES: Array(item_type=exchange),
        cn.DECISION_KEYS.FALLBACK: Boolean(),
        cn.DECISION_KEYS.P: Array(item_type=Number()),
        cn.DECISION_KEYS.C: Array(item_type=Number()),
        cn.DECISION_KEYS.L: Array(item_type=Number(additional_params=_probability)),
        cn.DECISION_KEYS.W: Array(item_type=Number()),
        cn.DECISION_KEYS.CHOSEN: Integer(nullable=True),
        cn.DECISION_KEYS.SUBGOAL_KIND: String(additional_params=dict(enum=constant_values(cn.SUBGOAL_KINDS))),
    },
)


outcome_record = Object(
    properties={
        cn.OUTCOME_KEYS.TYPE: String(additional_params=dict(enum=[cn.RECORD_TYPES.OUTCOME])),
        cn.OUTCOME_KEYS.SUCCESS: Boolean(),
        cn.OUTCOME_KEYS.PATH_LENGTH: Number(additional_params=dict(minimum=0)),
        cn.OUTCOME_KEYS.OPTIMAL_LENGTH: Number(additional_params=dict(minimum=0)),
        cn.OUTCOME_KEYS.EXPLORED_AREA: Number(additional_params=dict(minimum=0)),
        cn.OUTCOME_KEYS.COLLISIONS: Integer(additional_params=dict(minimum=0)),
        cn.OUTCOME_KEYS.FORWARDS: Integer(additional_params=dict(minimum=0)),
        cn.OUTCOME_KEYS.STEPS: Integer(additional_params=dict(minimum=0)),
        cn.OUTCOME_KEYS.FAILURE: String(nullable=True,
                                        additional_params=dict(enum=constant_values(cn.FAILURES) + [None])),
    },
)


record_schemas = {
    cn.RECORD_TYPES.EPISODE: episode_record,
    cn.RECORD_TYPES.STEP: step_record,
    cn.RECORD_TYPES.DECISION: decision_record,
    cn.RECORD_TYPES.OUTCOME: outcome_record,
}
