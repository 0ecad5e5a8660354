"""
Command-line front end.

Exit codes: 0 success, 2 parse/config error, 3 boundary scan resolution too
coarse, 4 spike in the support of nu or on a boundary of closure(U),
5 verification check failed (the report is still written).
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy

from .errors import DomainError, ResolutionError
from .measure import Measure
from .spectra import write_eigenvalues
from .spikes import SpikeSet, predict
from .subord import DEFAULT_RESOLUTION, SubordModel
from .verify import ConfigError, VerifyConfig, dumps_report, run_verify

EXIT_OK, EXIT_PARSE, EXIT_RESOLUTION, EXIT_SPIKE, EXIT_FAIL = 0, 2, 3, 4, 5


class UsageError(ValueError):
    pass


def _load_json(value):
    """JSON from a file path or an inline string."""
    if value is None:
        return None
    if os.path.exists(value):
        with open(value) as f:
            return json.load(f)
    return json.loads(value)


def _config(args):
    cfg = _load_json(args.config) if args.config else {}
    if not isinstance(cfg, dict):
        raise UsageError('config must be a JSON object')
    return cfg


def _model(args, cfg):
    spec = _load_json(args.measure) if args.measure else cfg.get('measure')
    if spec is None:
        raise UsageError('no measure given (use --measure or a config with "measure")')
    nu = Measure.from_dict(spec)
    sigma = args.sigma if args.sigma is not None else cfg.get('sigma')
    if sigma is None:
        raise UsageError('no sigma given')
    sigma = float(sigma)
    if not sigma > 0:
        raise UsageError('sigma must be positive')
    resolution = args.resolution or cfg.get('resolution', DEFAULT_RESOLUTION)
    return SubordModel.build(nu, sigma, int(resolution))


def _write(path, text):
    if path in (None, '-'):
        sys.stdout.write(text)
    else:
        with open(path, 'w') as f:
            f.write(text)


def cmd_support(args):
    cfg = _config(args)
    model = _model(args, cfg)
    _write(args.out, json.dumps(model.to_dict(), indent=1) + '\n')
    return EXIT_OK


def density_grid(model, points, kind='chebyshev', lo=None, hi=None):
    """
    Evaluation grid for density export.

    ``chebyshev`` spreads Chebyshev-Lobatto nodes over each support
    interval in proportion to its length, so trapezoid sums resolve the
    square-root edges; ``uniform`` is an evenly spaced grid on ``[lo, hi]``.
    """
    if points < 2:
        raise UsageError('density grid needs at least 2 points')
    if kind == 'uniform':
        if lo is None or hi is None:
            lo = model.support[0][0] - 0.1 * model.sigma
            hi = model.support[-1][1] + 0.1 * model.sigma
        return numpy.linspace(lo, hi, points)
    if kind != 'chebyshev':
        raise UsageError(f'unknown grid kind {kind!r}')
    lengths = numpy.array([b - a for a, b in model.support])
    counts = numpy.maximum(2, numpy.round(points * lengths / lengths.sum()).astype(int))
    parts = []
    for (a, b), m in zip(model.support, counts):
        # sine form of the Lobatto nodes: exactly symmetric, centre hit for odd m
        k = numpy.arange(m) - 0.5 * (m - 1)
        parts.append(0.5 * (a + b) + 0.5 * (b - a) * numpy.sin(math.pi * k / (m - 1)))
    return numpy.concatenate(parts)


GNUPLOT = """set datafile separator ','
set key autotitle columnhead
set xlabel 'x'
set ylabel 'density'
set y2label 'cdf'
set y2tics
plot '{csv}' using 1:2 with lines title 'density', \\
     '{csv}' using 1:3 axes x1y2 with lines title 'cdf'
"""


def cmd_density(args):
    cfg = _config(args)
    grid_cfg = cfg.get('grid', {})
    points = args.points if args.points is not None else grid_cfg.get('points', 2001)
    kind = args.grid or grid_cfg.get('kind', 'chebyshev')
    lo = args.lo if args.lo is not None else grid_cfg.get('lo')
    hi = args.hi if args.hi is not None else grid_cfg.get('hi')
    if int(points) < 2:
        raise UsageError('density grid needs at least 2 points')
    model = _model(args, cfg)
    x = density_grid(model, int(points), kind, lo, hi)
    dens = numpy.atleast_1d(model.free_density(x))
    cdf = numpy.atleast_1d(model.free_cdf(x))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(['x', 'density', 'cdf'])
    for row in zip(x, dens, cdf):
        writer.writerow([repr(float(v)) for v in row])
    _write(args.out, buf.getvalue())
    if args.out not in (None, '-'):
        _write(os.path.splitext(args.out)[0] + '.gp',
               GNUPLOT.format(csv=os.path.basename(args.out)))
    return EXIT_OK


def _spikes(args, cfg):
    raw = _load_json(args.spikes) if args.spikes else cfg.get('spikes', [])
    return SpikeSet.from_pairs(raw)


def cmd_classify(args):
    cfg = _config(args)
    model = _model(args, cfg)
    spikes = _spikes(args, cfg)
    n = args.n if args.n is not None else cfg.get('n')
    preds = predict(model, spikes, n=int(n) if n is not None else None)
    report = {'sigma': model.sigma, 'n': n,
              'spikes': [p.to_dict() for p in preds]}
    _write(args.out, json.dumps(report, indent=1) + '\n')
    return EXIT_OK


def cmd_verify(args):
    raw = _config(args)
    if not args.config:
        raise UsageError('verify needs --config')
    if args.seed is not None:
        raw['seed'] = args.seed
    if args.trials is not None:
        raw['trials'] = args.trials
    if args.resolution is not None:
        raw['resolution'] = args.resolution
    tol = dict(raw.get('tolerances', {}))
    for name in ('outlier', 'edge', 'bulk', 'ks', 'epsilon'):
        value = getattr(args, f'{name}_tol')
        if value is not None:
            tol[name] = value
    raw['tolerances'] = tol
    cfg = VerifyConfig.from_dict(raw)
    report = run_verify(cfg, workers=args.workers)
    _write(args.out, dumps_report(report))
    if args.dump_eigs:
        os.makedirs(args.dump_eigs, exist_ok=True)
        for trial in report['trials']:
            write_eigenvalues(os.path.join(args.dump_eigs, f"eigs_seed{trial['seed']}.csv"),
                              trial['eigenvalues'])
    for c in report['checks']:
        status = 'PASS' if c['pass'] else 'FAIL'
        print(f"{status} {c['name']}: {c['statistic']} = {c['value']:.4g} "
              f"(tolerance {c['tolerance']:g})", file=sys.stderr)
    return EXIT_OK if report['passed'] else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(
        prog='spikedwigner',
        description='Free convolution with a semicircle law and spiked '
                    'deformed Wigner matrices.')
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p):
        p.add_argument('--config', help='JSON config file')
        p.add_argument('--out', default='-', help='output file (default stdout)')
        p.add_argument('--seed', type=int)
        p.add_argument('--trials', type=int)
        p.add_argument('--resolution', type=int,
                       help=f'boundary scan points per unit length '
                            f'(default {DEFAULT_RESOLUTION})')

    def model_args(p):
        p.add_argument('--measure', help='measure spec: JSON file or inline JSON')
        p.add_argument('--sigma', type=float, help='semicircle scale (entry std)')

    p = sub.add_parser('support', help='support and U-components as JSON')
    common(p)
    model_args(p)
    p.set_defaults(func=cmd_support)

    p = sub.add_parser('density', help='density and cdf table as CSV')
    common(p)
    model_args(p)
    p.add_argument('--points', type=int)
    p.add_argument('--grid', choices=('chebyshev', 'uniform'))
    p.add_argument('--lo', type=float)
    p.add_argument('--hi', type=float)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser('classify', help='spike cases, limits and ranks as JSON')
    common(p)
    model_args(p)
    p.add_argument('--spikes', help='JSON list of [theta, multiplicity] pairs')
    p.add_argument('--n', type=int, help='matrix size for rank bookkeeping')
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser('verify', help='seeded Monte-Carlo verification')
    common(p)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--dump-eigs', metavar='DIR',
                   help='also write each trial spectrum as CSV (descending)')
    for name in ('outlier', 'edge', 'bulk', 'ks'):
        p.add_argument(f'--{name}-tol', type=float, dest=f'{name}_tol')
    p.add_argument('--epsilon', type=float, dest='epsilon_tol')
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ResolutionError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_RESOLUTION
    except DomainError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_SPIKE
    except (ConfigError, UsageError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_PARSE


if __name__ == '__main__':
    sys.exit(main())
