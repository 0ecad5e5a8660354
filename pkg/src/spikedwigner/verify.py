"""
Seeded Monte-Carlo verification runs.

A run samples ``trials`` deformed Wigner matrices with seeds
``seed, seed + 1, ...``, computes their spectra and compares them with the
free-probability predictions. All finite-``n`` tolerances are empirical
calibrations: the limit theorems carry no rates.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import datetime
import hashlib
import json
import statistics

import numpy

from . import __version__
from .ensemble import RNG_NAME, DeformedEnsemble, EntryDist, assemble, build_perturbation
from .errors import DomainError
from .measure import Measure
from .spectra import (
    SpectrumReport, check_inclusion, check_outliers, check_separation,
    eigenvalues_sorted, ks_distance,
)
from .spikes import BULK, EDGE_LEFT, EDGE_RIGHT, OUTLIER, SpikeSet, predict, separation_image
from .subord import DEFAULT_RESOLUTION, SubordModel

__all__ = ['ConfigError', 'Tolerances', 'VerifyConfig', 'run_trial', 'run_verify',
           'config_hash', 'dumps_report']


class ConfigError(ValueError):
    """Malformed or incomplete run configuration."""


@dataclass(frozen=True)
class Tolerances:
    outlier: float = 0.1
    edge: float = 0.15
    bulk: float = 0.15
    ks: float = 0.05
    epsilon: float = 0.2
    min_pass_fraction: float = 0.9

    def for_case(self, kind):
        return {OUTLIER: self.outlier, EDGE_RIGHT: self.edge,
                EDGE_LEFT: self.edge, BULK: self.bulk}[kind]


REQUIRED = ('n', 'dist', 'measure', 'spikes', 'seed', 'trials')


@dataclass(frozen=True)
class VerifyConfig:
    n: int
    dist: EntryDist
    measure: Measure
    spikes: SpikeSet
    seed: int
    trials: int
    gaps: tuple = ()
    tolerances: Tolerances = field(default_factory=Tolerances)
    resolution: int = DEFAULT_RESOLUTION
    rotate: bool = False
    eig_method: str = 'householder'

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError('config must be a JSON object')
        missing = [k for k in REQUIRED if k not in raw]
        if missing:
            raise ConfigError(f'config is missing field(s): {", ".join(missing)}')
        try:
            d = raw['dist']
            dist = EntryDist(d['tag'], float(d['variance']),
                             bool(d.get('outside_hypothesis', False)))
            tol = Tolerances(**raw.get('tolerances', {}))
            cfg = cls(
                n=int(raw['n']),
                dist=dist,
                measure=Measure.from_dict(raw['measure']),
                spikes=SpikeSet.from_pairs(raw['spikes']),
                seed=int(raw['seed']),
                trials=int(raw['trials']),
                gaps=tuple((float(a), float(b)) for a, b in raw.get('gaps', [])),
                tolerances=tol,
                resolution=int(raw.get('resolution', DEFAULT_RESOLUTION)),
                rotate=bool(raw.get('rotate', False)),
                eig_method=str(raw.get('eig_method', 'householder')),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f'invalid config: {exc}') from exc
        if cfg.n < 1 or cfg.trials < 1 or cfg.seed < 0:
            raise ConfigError('n and trials must be positive, seed nonnegative')
        return cfg

    def to_dict(self):
        return {
            'n': self.n,
            'dist': self.dist.to_dict(),
            'measure': self.measure.to_dict(),
            'spikes': [[t, k] for t, k in self.spikes.entries],
            'seed': self.seed,
            'trials': self.trials,
            'gaps': [list(g) for g in self.gaps],
            'tolerances': asdict(self.tolerances),
            'resolution': self.resolution,
            'rotate': self.rotate,
            'eig_method': self.eig_method,
        }


def config_hash(cfg):
    text = json.dumps(cfg.to_dict(), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode()).hexdigest()


def run_trial(cfg, model, predictions, a_spectrum, index):
    seed = cfg.seed + index
    ens = DeformedEnsemble(cfg.n, cfg.dist, a_spectrum, seed, cfg.rotate)
    eigs = eigenvalues_sorted(assemble(ens), method=cfg.eig_method)
    tol = cfg.tolerances
    return SpectrumReport(
        eigenvalues=eigs.tolist(),
        ks_distance=ks_distance(eigs, model),
        outlier_errors=check_outliers(eigs, predictions, tol.outlier),
        separation=check_separation(eigs, a_spectrum, model, cfg.gaps, cfg.spikes),
        inclusion_violations=check_inclusion(eigs, model, predictions, tol.epsilon),
        seed=seed,
    )


def _aggregate(cfg, predictions, reports):
    tol = cfg.tolerances
    checks = []
    for i, p in enumerate(predictions):
        errs = [r.outlier_errors[i].abs_error for r in reports]
        limit = tol.for_case(p.case_tag.kind)
        med = statistics.median(errs)
        checks.append({'name': f'spike theta={p.theta:g} ({p.case_tag.kind})',
                       'statistic': 'median abs error', 'value': med,
                       'tolerance': limit, 'pass': bool(med <= limit)})
    med_ks = statistics.median(r.ks_distance for r in reports)
    checks.append({'name': 'global law', 'statistic': 'median KS distance',
                   'value': med_ks, 'tolerance': tol.ks,
                   'pass': bool(med_ks <= tol.ks)})
    for j, (a, b) in enumerate(cfg.gaps):
        frac = sum(r.separation[j].match for r in reports) / len(reports)
        checks.append({'name': f'exact separation [{a:g}, {b:g}]',
                       'statistic': 'fraction of trials matching', 'value': frac,
                       'tolerance': tol.min_pass_fraction,
                       'pass': bool(frac >= tol.min_pass_fraction)})
    frac = sum(r.inclusion_violations == 0 for r in reports) / len(reports)
    checks.append({'name': f'spectrum inclusion (epsilon={tol.epsilon:g})',
                   'statistic': 'fraction of trials without violations',
                   'value': frac, 'tolerance': tol.min_pass_fraction,
                   'pass': bool(frac >= tol.min_pass_fraction)})
    return checks


def run_verify(cfg, workers=1):
    """
    Run every trial and aggregate.

    Returns the report as a dict; ``report['passed']`` is true when every
    check meets its tolerance. Raises :class:`DomainError` if a spike lies
    in the support of ``nu`` or on a boundary of the closure of ``U``, and
    :class:`ConfigError` for gaps that meet the limiting spectrum.
    """
    model = SubordModel.build(cfg.measure, cfg.dist.sigma, cfg.resolution)
    a_spectrum = build_perturbation(cfg.measure, cfg.n, cfg.spikes)
    # same bulk discretization as build_perturbation, so ranks agree
    predictions = predict(model, cfg.spikes, n=cfg.n)
    for a, b in cfg.gaps:
        try:
            separation_image(model, a, b, cfg.spikes)
        except DomainError as exc:
            raise ConfigError(f'invalid gap [{a}, {b}]: {exc}') from exc

    indices = range(cfg.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(
                lambda i: run_trial(cfg, model, predictions, a_spectrum, i), indices))
    else:
        reports = [run_trial(cfg, model, predictions, a_spectrum, i) for i in indices]

    checks = _aggregate(cfg, predictions, reports)
    return {
        'artifact': {'name': 'spikedwigner', 'version': __version__},
        'created': datetime.datetime.now(datetime.timezone.utc).isoformat(),
        'config': cfg.to_dict(),
        'config_hash': config_hash(cfg),
        'rng': RNG_NAME,
        'seeds': [r.seed for r in reports],
        'calibration': 'finite-n tolerances are empirical calibrations, not limit values',
        'model': model.to_dict(),
        'predictions': [p.to_dict() for p in predictions],
        'trials': [r.to_dict() for r in reports],
        'checks': checks,
        'passed': all(c['pass'] for c in checks),
    }


def dumps_report(report):
    return json.dumps(report, sort_keys=True, indent=1) + '\n'
