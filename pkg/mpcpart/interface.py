import os
import sys
import logging
import argparse

from .exceptions import ConfigError, MpcpartException, NotSchedulableWithinCap
from .experiment import (EXPERIMENT, METRIC_COLUMNS, RATIO_AXES, analyze, cores_spec, ratio_spec, run_sweep,
                         summary_csv, write_results)
from .formatters import CSV, FORMATS, JSON, TABLE, format
from .partition import DEFAULT_BETA, allocator, search_cores
from .taskgen import DEFAULTS, MODES, GenConfig, generate
from .taskio import dumps_allocation, dumps_taskset, read_allocation, read_taskset, taskset_to_dict
from .utils import dump_json, ensure_dir

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
INPUT_ERROR = 2

SWEEP_CORES = EXPERIMENT['sweep_cores']
SWEEP_RATIO = EXPERIMENT['sweep_ratio']
GENERATOR = DEFAULTS['generator']


class UsageException(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises instead of exiting, so main() picks the exit code."""

    def error(self, message):
        raise UsageException('%s\n%s' % (message, self.format_usage().strip()))


def _axis(name):
    return name.replace('-', '_')


def _add_generator_arguments(parser):
    parser.add_argument('--seed', type=int, default=GENERATOR['seed'], help='64-bit experiment seed')
    parser.add_argument('--util-range', type=float, nargs=2, metavar=('LOW', 'HIGH'),
                        default=GENERATOR['util_range'], help='bounds of every per-task utilization')
    parser.add_argument('--gen-mode', choices=MODES, default=GENERATOR['mode'],
                        help='utilization sampler: range constrained draw-rescale-repair, or plain uunifast')


def _add_sweep_arguments(parser):
    parser.add_argument('--trials', type=int, default=EXPERIMENT['trials'], help='task sets per point')
    parser.add_argument('--algorithms', nargs='+', choices=('brwfd', 'wfd'),
                        default=EXPERIMENT['algorithms'], help='allocators to compare')
    parser.add_argument('--beta', type=float, default=EXPERIMENT['beta'], help='BR-WFD blocking weight')
    parser.add_argument('--jobs', type=int, default=1, help='worker processes')
    parser.add_argument('--timings', action='store_true', default=False,
                        help='add wall_time_ms to records (output is then no longer byte-reproducible)')
    parser.add_argument('--out', help='directory for records.jsonl, summary.csv and meta.json')
    parser.add_argument('--format', choices=FORMATS, default=CSV, help='format of the summary on stdout')


def _base_config(opts):
    return GenConfig().replace(util_range=tuple(opts['util_range']), mode=opts['gen_mode'])


def _sweep_options(opts):
    return dict(trials=opts['trials'], algorithms=tuple(opts['algorithms']), seed=opts['seed'],
                beta=opts['beta'], base=_base_config(opts), jobs=opts['jobs'], timings=opts['timings'])


def _finish_sweep(spec, opts):
    result = run_sweep(spec)
    if opts['out']:
        paths = write_results(result, opts['out'])
        logger.info('wrote %s', ', '.join(paths))
    if opts['format'] == CSV:
        return summary_csv(result.summary).rstrip('\n')
    rows = [dict((key, value) for key, value in row.items() if value != '' or key in METRIC_COLUMNS)
            for row in result.summary]
    return format(rows, opts['format'])


def _single(opts, name):
    values = opts[name]
    if values is None:
        return None
    if len(values) != 1:
        raise ConfigError('--%s takes one value unless it is the swept axis' % name.replace('_', '-'))
    return values[0]


def command_gen(opts):
    cfg = _base_config(opts).replace(total_load=opts['load'], cs_ratio=opts['cs_ratio'], seed=opts['seed'],
                                     resources_per_group=opts['resources_per_group'])
    if opts['util'] is not None:
        cfg = cfg.replace(util_range=(opts['util'], opts['util']))
    cfg.validate()
    if opts['trials'] < 1:
        raise ConfigError('trials must be at least 1, got %d' % opts['trials'])

    sets = [generate(cfg, trial=trial) for trial in range(opts['first_trial'], opts['first_trial'] + opts['trials'])]
    if opts['out']:
        ensure_dir(opts['out'])
        for trial, ts in zip(range(opts['first_trial'], opts['first_trial'] + opts['trials']), sets):
            with open(os.path.join(opts['out'], 'taskset_%04d.json' % trial), 'w') as handle:
                handle.write(dumps_taskset(ts) + '\n')
        return 'Wrote %d task set(s) to %s' % (len(sets), opts['out'])
    if len(sets) == 1:
        return dumps_taskset(sets[0])
    return '\n'.join(dump_json(taskset_to_dict(ts)) for ts in sets)


def command_analyze(opts):
    ts = read_taskset(opts['file'])
    alloc = read_allocation(opts['allocation'], ts) if opts['allocation'] else None
    report = analyze(ts, alloc, opts['cores'], opts['beta'])
    logger.info('analyzed %d task(s) on %d core(s): %s', ts.n, report['cores'], report['verdict'])
    return format(report, opts['format'])


def command_partition(opts):
    ts = read_taskset(opts['file'])
    name = opts['algorithm']
    if opts['cores'] is None:
        try:
            cores, outcome = search_cores(ts, name, opts['cap'], opts['beta'])
        except NotSchedulableWithinCap as e:
            logger.warning('%s, reporting the %s allocation at the cap', e, name)
            cores, outcome = e.cap, allocator(name, opts['beta'])(ts, e.cap)
    else:
        cores, outcome = opts['cores'], allocator(name, opts['beta'])(ts, opts['cores'])

    if opts['out']:
        with open(opts['out'], 'w') as handle:
            handle.write(dumps_allocation(outcome.allocation) + '\n')
        logger.info('wrote allocation to %s', opts['out'])

    report = {'algorithm': name, 'core_count': cores}
    report.update(outcome.as_dict())
    logger.info('%s on %d core(s): %s', name, cores, report['verdict'])
    return format(report, opts['format'])


def command_sweep_cores(opts):
    spec = cores_spec(opts['load'], opts['cs_ratio'], cap=opts['cap'], **_sweep_options(opts))
    return _finish_sweep(spec, opts)


def command_sweep_ratio(opts):
    axis = _axis(opts['axis'])
    if axis != 'core_multiple' and opts['core_multiple'] is not None:
        raise ConfigError('--core-multiple only applies to the core-multiple axis, use --cores')
    fixed = dict((name, _single(opts, name)) for name in ('cs_ratio', 'util', 'resources_per_group') if name != axis)
    if fixed.get('cs_ratio') is None and axis != 'cs_ratio':
        fixed['cs_ratio'] = GENERATOR['cs_ratio']
    spec = ratio_spec(axis, opts[axis] or SWEEP_RATIO[axis], opts['load'], cores=opts['cores'],
                      **dict(fixed, **_sweep_options(opts)))
    return _finish_sweep(spec, opts)


COMMANDS = {
    'gen': command_gen,
    'analyze': command_analyze,
    'partition': command_partition,
    'sweep-cores': command_sweep_cores,
    'sweep-ratio': command_sweep_ratio,
}


def parse_arguments(args):
    """
    Creates the subparsers for the mpcpart application, parses the
    command-line arguments and runs the selected command.

    :args      List of command-line arguments
    :return    Output of the command as a string
    """
    parser = ArgumentParser(description='MPCP blocking analysis and blocking-aware task partitioning.',
                            prog='mpcpart')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='more logging, repeatable')
    parser.add_argument('-q', '--quiet', action='store_true', default=False, help='only log errors')
    subparsers = parser.add_subparsers(help='Sub-command menu', dest='command')

    gen = subparsers.add_parser('gen', help='generate task sets')
    _add_generator_arguments(gen)
    gen.add_argument('--trials', type=int, default=1, help='number of task sets')
    gen.add_argument('--first-trial', type=int, default=0, help='trial index of the first task set')
    gen.add_argument('--load', type=float, default=GENERATOR['total_load'], help='total utilization S')
    gen.add_argument('--cs-ratio', type=float, default=GENERATOR['cs_ratio'], help='critical section ratio')
    gen.add_argument('--util', type=float, help='fixed per-task utilization, overrides --util-range')
    gen.add_argument('--resources-per-group', type=int, default=GENERATOR['resources_per_group'])
    gen.add_argument('--out', help='directory for one file per task set; JSON lines on stdout otherwise')

    analyze_parser = subparsers.add_parser('analyze', help='blocking and response times of a task set')
    analyze_parser.add_argument('file', help='task set JSON')
    analyze_parser.add_argument('--allocation', help='allocation JSON; a fresh BR-WFD run when omitted')
    analyze_parser.add_argument('--cores', type=int, help='cores of the fresh BR-WFD run; searched when omitted')
    analyze_parser.add_argument('--beta', type=float, default=DEFAULT_BETA)
    analyze_parser.add_argument('--format', choices=(TABLE, JSON), default=TABLE)

    partition = subparsers.add_parser('partition', help='allocate a task set to cores')
    partition.add_argument('file', help='task set JSON')
    partition.add_argument('--algorithm', choices=('brwfd', 'wfd', 'exhaustive'), default='brwfd')
    partition.add_argument('--cores', type=int, help='core count; the minimum is searched when omitted')
    partition.add_argument('--cap', type=int, help='largest core count tried by the search')
    partition.add_argument('--beta', type=float, default=DEFAULT_BETA)
    partition.add_argument('--out', help='write the allocation JSON to this file')
    partition.add_argument('--format', choices=(TABLE, JSON), default=TABLE)

    cores = subparsers.add_parser('sweep-cores', help='minimum core counts over load x cs_ratio')
    _add_generator_arguments(cores)
    _add_sweep_arguments(cores)
    cores.add_argument('--load', type=float, nargs='+', default=SWEEP_CORES['load'])
    cores.add_argument('--cs-ratio', type=float, nargs='+', default=SWEEP_CORES['cs_ratio'])
    cores.add_argument('--cap', type=int, help='largest core count tried per task set')

    ratio = subparsers.add_parser('sweep-ratio', help='schedulable ratio along one axis')
    _add_generator_arguments(ratio)
    _add_sweep_arguments(ratio)
    ratio.add_argument('--axis', required=True, choices=[name.replace('_', '-') for name in RATIO_AXES])
    ratio.add_argument('--load', type=float, default=GENERATOR['total_load'], help='total utilization S')
    ratio.add_argument('--cs-ratio', type=float, nargs='+')
    ratio.add_argument('--util', type=float, nargs='+', help='fixed per-task utilizations')
    ratio.add_argument('--core-multiple', type=float, nargs='+', help='m = ceil(mu * S)')
    ratio.add_argument('--resources-per-group', type=int, nargs='+')
    ratio.add_argument('--cores', type=int, help='fixed core count, 2 * ceil(S) by default')

    opts = vars(parser.parse_args(args))
    level = logging.ERROR if opts['quiet'] else max(logging.DEBUG, logging.WARNING - 10 * opts['verbose'])
    logging.basicConfig(stream=sys.stderr, level=level, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('mpcpart').setLevel(level)

    if opts['command'] in COMMANDS:
        return COMMANDS[opts['command']](opts)
    return parser.format_help()


def main(*args):
    """
    Command-line main interface for the mpcpart application.

    :args      Command-line arguments, defaults to sys.argv if omitted
    :return    Exit code: 0 on success, 1 on usage errors, 2 on invalid input
    """
    try:
        args = sys.argv[1:] if len(args) == 0 else list(args)
        result = parse_arguments(args)
        print(format(result if result is not None else 'Success'))
        return 0
    except UsageException as e:
        print('Error: %s' % e, file=sys.stderr)
        return USAGE_ERROR
    except (MpcpartException, OSError) as e:
        print('Error: %s' % e, file=sys.stderr)
        return INPUT_ERROR
    except SystemExit as e:
        # --help and --version exit through argparse.
        return e.code or 0
