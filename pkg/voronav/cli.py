"""The ``voronav`` command line.

Subcommands:

    voronav run --scene F [--method M] [--backend B] [--no-path] [--no-farsight] [--trace OUT]
    voronav bench --suite DIR --episodes N [--methods ...] [--report table.md]
    voronav render --trace T.jsonl [--step K] [--out map.ppm]
    voronav generate --style {maze,apartment} --count N --seed S --out DIR
"""

import argparse
import json
import logging
import os
import sys

from . import __version__
from . import config as cf
from . import constants as cn
from . import eval as evaluation
from . import gridworld, navigators, rvg, scenegen, scorer, traces, utils
from .exceptions import VoroNavError
from .semantic_map import dump_layers


_logger = logging.getLogger(__name__)

LOG_FIELDS = ('asctime', 'levelname', 'name', 'message', 'event', 'scene', 'method', 'seed', 'step')


def setup_logging(level='WARNING', as_json=False):
    handler = logging.StreamHandler(sys.stderr)
    if as_json:
        handler.setFormatter(utils.JSONLogFormatter(*LOG_FIELDS))
    else:
        handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    logger = logging.getLogger('voronav')
    logger.handlers = [h for h in logger.handlers if isinstance(h, logging.NullHandler)] + [handler]
    logger.setLevel(level.upper())
    return logger


def _planner_config(args):
    config = cf.load_config(args.config) if args.config else cf.PlannerConfig()
    changes = {}
    if getattr(args, 'seed', None) is not None:
        changes['seed'] = args.seed
    if getattr(args, 'max_steps', None) is not None:
        changes['max_steps'] = args.max_steps
    if getattr(args, 'no_path', False):
        changes['use_path_desc'] = False
    if getattr(args, 'no_farsight', False):
        changes['use_farsight'] = False
    return config.replace(**changes)


def _backend(args):
    return scorer.make_backend(scorer.BackendConfig.from_env(kind=args.backend))


def run(args):
    scene = gridworld.load_scene(args.scene)
    config = _planner_config(args)
    backend = _backend(args) if args.method == cn.METHODS.VORONAV else None
    navigator = navigators.NAVIGATORS[args.method](scene, config, backend, scene_path=args.scene)
    trace = navigator.run()
    if args.trace:
        traces.write_trace(trace, args.trace)
    if args.dump_map:
        dump_layers(navigator.map, args.dump_map)
    if args.dump_graph:
        classified = navigator.classified() if hasattr(navigator, 'classified') else None
        if classified is None:
            _logger.warning('no graph to dump', extra={'event': 'graph_dump'})
        else:
            with open(args.dump_graph, 'w') as f:
                f.write(rvg.graph_to_dot(classified))
    print(json.dumps(trace.outcome, sort_keys=True, cls=cf.json_encoder))
    return 0


def bench(args):
    params = evaluation.MetricParams.preset(args.preset)
    if args.eta is not None or args.gamma is not None:
        params = evaluation.MetricParams(params.eta if args.eta is None else args.eta,
                                         params.gamma if args.gamma is None else args.gamma)
    backend = _backend(args)
    report = evaluation.run_suite(args.suite, args.methods, args.episodes, _planner_config(args),
                                  backend, jobs=args.jobs, trace_dir=args.trace_dir, params=params)
    if args.report:
        report.write(args.report)
    print(report.to_markdown(), end='')
    return 0


def render(args):
    trace = traces.read_trace(args.trace)
    scene_path = args.scene or trace.scene_path
    if not scene_path:
        raise VoroNavError('trace does not name its scene; pass --scene')
    scene = gridworld.load_scene(scene_path)
    semantic_map, poses = traces.replay(trace, scene, upto=args.step)
    if args.out and not args.out.endswith('.txt'):
        traces.write_image(traces.render_image(semantic_map, poses, scene.goal_name), args.out)
        return 0
    text = traces.render_ascii(semantic_map, poses, scene.goal_name)
    if args.out:
        with open(args.out, 'w') as f:
            f.write(text)
    else:
        print(text, end='')
    return 0


def generate(args):
    os.makedirs(args.out, exist_ok=True)
    for i in range(args.count):
        scene = scenegen.generate_scene(args.seed + i, args.style, args.size, args.resolution)
        path = os.path.join(args.out, f'{scene.name}.json')
        with open(path, 'w') as f:
            json.dump(scene.to_dict(), f, cls=cf.json_encoder)
        print(path)
    return 0


def init_cli():
    """Build the argument parser."""
    cli = argparse.ArgumentParser(prog='voronav', description='object search on Voronoi graphs')
    cli.add_argument('--version', action='version', version=__version__)
    cli.add_argument('--log-level', default='WARNING', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    cli.add_argument('--log-json', action='store_true', help='write log records as JSON')
    commands = cli.add_subparsers(dest='command', required=True)

    methods = utils.constant_values(cn.METHODS)
    backends = utils.constant_values(cn.BACKENDS)

    p = commands.add_parser('run', help='run one episode')
    p.add_argument('--scene', required=True)
    p.add_argument('--method', default=cn.METHODS.VORONAV, choices=methods)
    p.add_argument('--backend', default=cn.BACKENDS.MOCK, choices=backends)
    p.add_argument('--no-path', action='store_true', help='leave path descriptions out of prompts')
    p.add_argument('--no-farsight', action='store_true', help='leave farsight descriptions out of prompts')
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--max-steps', type=int, default=None)
    p.add_argument('--config', default=None, help='.json or .toml planner config')
    p.add_argument('--trace', default=None, help='write the trace as JSON Lines')
    p.add_argument('--dump-graph', default=None, help='write the final Voronoi graph as DOT')
    p.add_argument('--dump-map', default=None, help='write the final map layers as PGM images')
    p.set_defaults(func=run)

    p = commands.add_parser('bench', help='run a suite of scenes and report metrics')
    p.add_argument('--suite', required=True, help='directory of scene files or a suite definition .json')
    p.add_argument('--episodes', type=int, required=True)
    p.add_argument('--methods', nargs='+', default=methods, choices=methods)
    p.add_argument('--backend', default=cn.BACKENDS.MOCK, choices=backends)
    p.add_argument('--no-path', action='store_true')
    p.add_argument('--no-farsight', action='store_true')
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--max-steps', type=int, default=None)
    p.add_argument('--config', default=None)
    p.add_argument('--jobs', type=int, default=1)
    p.add_argument('--preset', default='hssd', choices=sorted(evaluation.PRESETS))
    p.add_argument('--eta', type=float, default=None)
    p.add_argument('--gamma', type=float, default=None, help='SEA discount; explored area is in m^2')
    p.add_argument('--report', default=None, help='write the Markdown table here')
    p.add_argument('--trace-dir', default=None)
    p.set_defaults(func=bench)

    p = commands.add_parser('render', help='draw the map of a trace')
    p.add_argument('--trace', required=True)
    p.add_argument('--scene', default=None, help='scene file; defaults to the one named in the trace')
    p.add_argument('--step', type=int, default=None)
    p.add_argument('--out', default=None, help='.ppm/.png image, or .txt for ASCII; stdout when omitted')
    p.set_defaults(func=render)

    p = commands.add_parser('generate', help='write procedurally generated scenes')
    p.add_argument('--style', default='apartment', choices=scenegen.STYLES)
    p.add_argument('--count', type=int, default=1)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--size', type=float, default=6.0)
    p.add_argument('--resolution', type=float, default=0.05)
    p.add_argument('--out', required=True)
    p.set_defaults(func=generate)
    return cli


def main(argv=None):
    args = init_cli().parse_args(argv)
    setup_logging(args.log_level, args.log_json)
    try:
        return args.func(args)
    except VoroNavError as err:
        _logger.exception(str(err), extra={'event': 'error', 'command': args.command})
        return err.code


if __name__ == '__main__':
    sys.exit(main())
