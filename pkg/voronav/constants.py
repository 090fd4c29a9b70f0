"""Global constants: label codes, motion constants, record keys and asset paths."""

import os

# this must be an absolute path
ASSETS_DIR = os.path.join(os.path.dirname(__file__), 'assets')
TEMPLATES_DIR = os.path.join(ASSETS_DIR, 'templates')
RELATEDNESS_TABLE_PATH = os.path.join(ASSETS_DIR, 'relatedness.json')
BENCHMARK_SUITE_PATH = os.path.join(ASSETS_DIR, 'benchmark_suite.json')


FREE = 0
OBSTACLE = -1

GOAL_CATEGORIES = ('bed', 'chair', 'sofa', 'tv', 'plant', 'toilet')

FORWARD_STEP_M = 0.25
TURN_DEG = 30.0
LOOKAROUND_TURNS = 12
AGENT_RADIUS_M = 0.18
HFOV_DEG = 79.0
DEPTH_RANGE_M = 5.0

FRONTIER_FALLBACK = 'FRONTIER_FALLBACK'


class METHODS:
    VORONAV = 'voronav'
    VORONOI = 'voronoi'
    FRONTIER = 'frontier'
    RANDOM = 'random'


class BACKENDS:
    MOCK = 'mock'
    REMOTE = 'remote'


class FAILURES:
    EXPLORATION = 'exploration'
    PLANNING = 'planning'


class SUBGOAL_KINDS:
    TARGET = 'target'
    NODE = 'node'
    FRONTIER = 'frontier'


class RECORD_TYPES:
    EPISODE = 'episode'
    STEP = 'step'
    DECISION = 'decision'
    OUTCOME = 'outcome'


class BASE_KEYS:
    TYPE = 'type'
    STEP = 'step'


class EPISODE_KEYS(BASE_KEYS):
    SCHEMA_VERSION = 'schema_version'
    SCENE = 'scene'
    SCENE_PATH = 'scene_path'
    METHOD = 'method'
    SEED = 'seed'
    GOAL = 'goal'
    BACKEND = 'backend'
    CONFIG = 'config'


class STEP_KEYS(BASE_KEYS):
    POSE = 'pose'
    ACTION = 'action'
    COLLISION = 'collision'


class DECISION_KEYS(BASE_KEYS):
    AGENT_NODE = 'agent_node'
    NODE_COUNT = 'node_count'
    EDGE_COUNT = 'edge_count'
    NEIGHBORS = 'neighbors'
    EXPLORATORY = 'exploratory'
    PATH_PROMPT = 'path_prompt'
    DECISION_PROMPT = 'decision_prompt'
    EXCHANGES = 'exchanges'
    FALLBACK = 'fallback'
    P = 'P'
    C = 'C'
    L = 'L'
    W = 'W'
    CHOSEN = 'chosen'
    SUBGOAL_KIND = 'subgoal_kind'


class EXCHANGE_KEYS:
    PROMPT = 'prompt'
    RESPONSE = 'response'


class OUTCOME_KEYS(BASE_KEYS):
    SUCCESS = 'success'
    PATH_LENGTH = 'path_length'
    OPTIMAL_LENGTH = 'optimal_length'
    EXPLORED_AREA = 'explored_area'
    COLLISIONS = 'collisions'
    FORWARDS = 'forwards'
    STEPS = 'steps'
    FAILURE = 'failure'


class REPORT_KEYS:
    METHOD = 'Method'
    SUCCESS = 'Success'
    SPL = 'SPL'
    SCA = 'SCA'
    SEA = 'SEA'
    EPISODES = 'Episodes'
    MEAN_STEPS = 'Mean steps'
    EXPLORATION_FAILURES = 'Exploration failures'
    PLANNING_FAILURES = 'Planning failures'
