import json
import math

import numpy
import pytest

from spikedwigner.cli import main
from spikedwigner.ensemble import build_perturbation
from spikedwigner.measure import Atom, Measure, Uniform
from spikedwigner.spikes import SpikeSet, predict
from spikedwigner.subord import SubordModel

# Monte-Carlo scenarios shared by the spectra tests and the acceptance suite,
# run through the ``verify`` command at n = 2000 with Gaussian entries.
# name -> (measure spec, sigma, spikes, gaps, trials)
DELTA0 = {'pieces': [{'kind': 'atom', 'x': 0.0, 'w': 1.0}]}
TWO_ATOM = {'pieces': [{'kind': 'atom', 'x': -1.0, 'w': 0.5},
                       {'kind': 'atom', 'x': 1.0, 'w': 0.5}]}
UNIFORM = {'pieces': [{'kind': 'uniform', 'a': -1.0, 'b': 1.0, 'w': 1.0}]}
SCENARIOS = {
    'delta0_spiked': (DELTA0, 1.0, [[2.0, 1], [0.5, 1]], [[2.1, 2.4]], 10),
    'two_atom_bulk': (TWO_ATOM, 2.0, [[0.0, 1]], [], 10),
    'uniform_plain': (UNIFORM, 1.0, [], [], 10),
    'delta0_plain': (DELTA0, 1.0, [], [], 1),
}
MC_N = 2000
MC_SEED = 20110809

ACCEPTANCE_LINES = []


def scenario_config(name):
    measure, sigma, spikes, gaps, trials = SCENARIOS[name]
    return {'n': MC_N, 'dist': {'tag': 'gaussian', 'variance': sigma ** 2},
            'measure': measure, 'spikes': spikes, 'seed': MC_SEED,
            'trials': trials, 'gaps': gaps}


@pytest.fixture(scope='session')
def delta0():
    return SubordModel.build(Measure.atom(0.0), 1.0)


@pytest.fixture(scope='session')
def unif():
    return SubordModel.build(Measure.uniform(-1.0, 1.0), 1.0)


@pytest.fixture(scope='session')
def two_atom():
    return SubordModel.build(Measure.atoms([-1.0, 1.0]), 2.0)


@pytest.fixture(scope='session')
def two_atom_narrow():
    return SubordModel.build(Measure.atoms([-1.0, 1.0]), 0.3)


@pytest.fixture(scope='session')
def skewed():
    return SubordModel.build(Measure.atoms([-3.0, 3.0], [0.25, 0.75]), 0.5)


@pytest.fixture(scope='session')
def mixed():
    nu = Measure((Uniform(-2.0, -1.0, 0.3), Atom(0.5, 0.2), Uniform(1.0, 1.5, 0.5)))
    return SubordModel.build(nu, 0.35)


class MonteCarlo:
    """Scenario runs through ``spikedwigner verify``, each done once per session."""

    def __init__(self, workdir):
        self.workdir = workdir
        self._cache = {}

    def __call__(self, name):
        if name not in self._cache:
            cfg = scenario_config(name)
            path = self.workdir / f'{name}.json'
            out = self.workdir / f'{name}.report.json'
            path.write_text(json.dumps(cfg))
            code = main(['verify', '--config', str(path), '--out', str(out)])
            report = json.loads(out.read_text())
            measure, sigma, pairs, gaps, _ = SCENARIOS[name]
            nu = Measure.from_dict(measure)
            spikes = SpikeSet.from_pairs(pairs)
            model = SubordModel.build(nu, sigma)
            self._cache[name] = {
                'exit_code': code, 'report': report, 'config': cfg,
                'model': model, 'spikes': spikes,
                'a': build_perturbation(nu, MC_N, spikes),
                'eigs': [numpy.array(t['eigenvalues']) for t in report['trials']],
                'predictions': predict(model, spikes, n=MC_N),
            }
        return self._cache[name]


@pytest.fixture(scope='session')
def mc(tmp_path_factory):
    return MonteCarlo(tmp_path_factory.mktemp('mc'))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def semicircle_g(z, sigma=1.0):
    # branch with g ~ 1/z at infinity, Im g < 0 on the upper half plane
    z = numpy.asarray(z, dtype=complex)
    root = numpy.sqrt(z - 2 * sigma) * numpy.sqrt(z + 2 * sigma)
    return (z - root) / (2 * sigma ** 2)


def semicircle_density(x, sigma=1.0):
    x = numpy.asarray(x, dtype=float)
    return numpy.sqrt(numpy.clip(4 * sigma ** 2 - x ** 2, 0, None)) / (2 * math.pi * sigma ** 2)
