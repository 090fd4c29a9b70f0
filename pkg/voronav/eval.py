"""Benchmark metrics, reports and the batch runner."""

import glob
import logging
import math
import os
from dataclasses import dataclass

import jinja2
import joblib
import pandas as pd

from . import constants as cn
from . import gridworld, loading, navigators, scenegen, schemas, traces
from .config import PlannerConfig
from .exceptions import ValidationError


_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricParams:
    """Discounts of the collision (``eta``) and exploration (``gamma``) weighted success."""
    eta: float = 1.0
    gamma: float = 0.01

    def __post_init__(self):
        if not 0 <= self.eta <= 1:
            raise ValidationError(f'eta must lie in [0, 1], got {self.eta!r}')
        if not self.gamma > 0:
            raise ValidationError(f'gamma must be > 0, got {self.gamma!r}')

    @classmethod
    def preset(cls, name):
        try:
            eta, gamma = PRESETS[name]
        except KeyError:
            raise ValidationError(f'unknown metric preset {name!r}') from None
        return cls(eta, gamma)


PRESETS = {
    'hm3d': (0.1, 0.002),
    'hssd': (1.0, 0.01),
}


def episode_metrics(success, optimal_length, path_length, collisions, forwards, explored_area,
                    params=None):
    """Per-episode Success, SPL, SCA and SEA as fractions.

    Zero forward steps leave the collision term at 0 and a zero path length
    gives an SEA of 0; an episode with both lengths 0 has an SPL of 1.
    """
    params = params or MetricParams()
    s = 1.0 if success else 0.0
    longest = max(path_length, optimal_length)
    spl = s * (optimal_length / longest if longest > 0 else 1.0)
    sca = s * (1.0 - params.eta * collisions / forwards if forwards else 1.0)
    sea = s * (params.gamma * math.sqrt(explored_area) / path_length if path_length > 0 else 0.0)
    return {cn.REPORT_KEYS.SUCCESS: s, cn.REPORT_KEYS.SPL: spl, cn.REPORT_KEYS.SCA: sca,
            cn.REPORT_KEYS.SEA: sea}


def metrics(episodes, params=None, optimal=None):
    """Report row averaged over finished traces, in percent.

    Args:
        episodes (list of EpisodeTrace): Traces with an outcome.
        params (MetricParams or None): Discounts; the ``hssd`` pair when None.
        optimal (list of float or None): Shortest path lengths overriding the
            ones stored in the traces.

    Returns:
        dict: Keyed by ``constants.REPORT_KEYS``.
    """
    if not episodes:
        raise ValueError('no episodes to score')
    if optimal is not None and len(optimal) != len(episodes):
        raise ValueError('need one optimal length per episode')
    params = params or MetricParams()
    keys = cn.REPORT_KEYS
    totals = dict.fromkeys((keys.SUCCESS, keys.SPL, keys.SCA, keys.SEA), 0.0)
    for i, trace in enumerate(episodes):
        length = trace.optimal_length if optimal is None else optimal[i]
        row = episode_metrics(trace.success, length, trace.path_length, trace.collisions,
                              trace.forwards, trace.explored_area, params)
        for key, value in row.items():
            totals[key] += value
    n = len(episodes)
    row = {key: 100.0 * value / n for key, value in totals.items()}
    row[keys.EPISODES] = n
    row[keys.MEAN_STEPS] = sum(trace.step_count for trace in episodes) / n
    row[keys.EXPLORATION_FAILURES] = sum(trace.failure == cn.FAILURES.EXPLORATION for trace in episodes)
    row[keys.PLANNING_FAILURES] = sum(trace.failure == cn.FAILURES.PLANNING for trace in episodes)
    return row


class Report:
    """One row of metrics per method, in the order methods were added."""

    columns = [cn.REPORT_KEYS.METHOD, cn.REPORT_KEYS.SUCCESS, cn.REPORT_KEYS.SPL,
               cn.REPORT_KEYS.SCA, cn.REPORT_KEYS.SEA, cn.REPORT_KEYS.EPISODES,
               cn.REPORT_KEYS.MEAN_STEPS, cn.REPORT_KEYS.EXPLORATION_FAILURES,
               cn.REPORT_KEYS.PLANNING_FAILURES]

    def __init__(self, params=None):
        self.params = params or MetricParams()
        self.rows = []

    def add(self, method, episodes):
        row = {cn.REPORT_KEYS.METHOD: method}
        row.update(metrics(episodes, self.params))
        self.rows.append(row)
        return row

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=self.columns)

    def to_markdown(self):
        frame = self.to_frame()
        rows = []
        for record in frame.to_dict(orient='records'):
            rows.append([_cell(record[column]) for column in self.columns])
        template = jinja2.Template(loading.load_template('report_table'), trim_blocks=True,
                                   lstrip_blocks=True)
        return template.render(columns=self.columns, rows=rows, eta=self.params.eta,
                               gamma=self.params.gamma) + '\n'

    def write(self, path):
        with open(path, 'w') as f:
            f.write(self.to_markdown())
        _logger.info('wrote report', extra={'event': 'report_written', 'path': path})


def _cell(value):
    if isinstance(value, float):
        return f'{value:.1f}'
    return str(value)


def load_suite(directory):
    """Scene files of a suite directory as sorted ``(path, Scene)`` pairs."""
    paths = sorted(glob.glob(os.path.join(directory, '*.json')))
    if not paths:
        raise ValidationError(f'no scene files in {directory}')
    return [(path, gridworld.load_scene(path)) for path in paths]


def load_benchmark(path=cn.BENCHMARK_SUITE_PATH):
    """Generate the scenes named by a suite definition file.

    The definition gives a scene style, a seed range, a size and a resolution;
    the same file always yields the same scenes.

    Returns:
        tuple: ``(suite, definition)`` with ``suite`` holding ``(None, Scene)``
            pairs in seed order.

    Raises:
        ValidationError: If the definition does not match its schema.
    """
    definition = loading.load_file(path)
    try:
        schemas.benchmark_suite.validate(definition)
    except ValueError as err:
        raise ValidationError(f'{path}: {err}') from err
    first = definition['first_seed']
    suite = [(None, scenegen.generate_scene(seed, definition['style'], definition['size_m'],
                                            definition['resolution_m']))
             for seed in range(first, first + definition['count'])]
    _logger.info('benchmark generated', extra={'event': 'benchmark_loaded', 'suite': definition['name'],
                                                   'scenes': len(suite)})
    return suite, definition


def _run_one(path, scene, method, config, backend, trace_dir):
    trace = navigators.run_episode(scene, config, backend, method=method, scene_path=path)
    if trace_dir:
        directory = os.path.join(trace_dir, method)
        os.makedirs(directory, exist_ok=True)
        traces.write_trace(trace, os.path.join(directory, f'{scene.name}_seed{config.seed}.jsonl'))
    return trace


def run_method(suite, method, episodes, config=None, backend=None, jobs=1, trace_dir=None):
    """Run ``episodes`` episodes of ``method`` over the scenes of ``suite``.

    Episode ``i`` uses scene ``i % len(suite)`` and seed ``config.seed + i``.
    Results come back in episode order whatever ``jobs`` is.
    """
    config = config or PlannerConfig()
    tasks = []
    for i in range(episodes):
        path, scene = suite[i % len(suite)]
        tasks.append(joblib.delayed(_run_one)(path, scene, method, config.replace(seed=config.seed + i),
                                              backend, trace_dir))
    results = joblib.Parallel(n_jobs=jobs, prefer='threads')(tasks)
    _logger.info('method finished', extra={'event': 'method_done', 'method': method,
                                           'episodes': episodes,
                                           'successes': sum(t.success for t in results)})
    return results


def run_suite(suite, methods, episodes, config=None, backend=None, jobs=1, trace_dir=None,
              params=None):
    """Run every method over the same episodes and return the :class:`Report`."""
    if isinstance(suite, str):
        suite = load_benchmark(suite)[0] if suite.endswith('.json') else load_suite(suite)
    report = Report(params)
    for method in methods:
        report.add(method, run_method(suite, method, episodes, config, backend, jobs, trace_dir))
    return report
