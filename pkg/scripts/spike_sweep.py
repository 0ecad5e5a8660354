"""
Largest eigenvalue against a single spike theta: below the threshold it
sticks to the edge of the support, above it follows H(theta).

    python scripts/spike_sweep.py --measure uniform --n 1000 --trials 3
"""

import argparse
import statistics

import numpy

from spikedwigner.ensemble import DeformedEnsemble, EntryDist, assemble, build_perturbation
from spikedwigner.measure import Measure
from spikedwigner.spectra import eigenvalues_sorted
from spikedwigner.spikes import SpikeSet, predict
from spikedwigner.subord import SubordModel

MEASURES = {
    'delta0': Measure.atom(0.0),
    'uniform': Measure.uniform(-1.0, 1.0),
    'two_atoms': Measure.atoms([-1.0, 1.0]),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.split('\n\n')[0])
    parser.add_argument('--measure', default='delta0', choices=sorted(MEASURES))
    parser.add_argument('--sigma', type=float, default=1.0)
    parser.add_argument('--n', type=int, default=1000)
    parser.add_argument('--trials', type=int, default=3)
    parser.add_argument('--seed', type=int, default=1)
    parser.add_argument('--thetas', type=float, nargs='*')
    args = parser.parse_args()

    nu = MEASURES[args.measure]
    model = SubordModel.build(nu, args.sigma)
    t_max = model.u_components[-1][1]
    thetas = args.thetas or list(numpy.round(numpy.linspace(nu.bounds[1] + 0.1, t_max + 1.5, 9), 3))
    print(f'# {args.measure}, sigma={args.sigma}: threshold t = {t_max:.6f}, '
          f'right edge {model.support[-1][1]:.6f}')
    print(f"# {'theta':>8s} {'case':>12s} {'limit':>10s} {'lambda_1':>10s} {'|err|':>8s}")
    dist = EntryDist('gaussian', args.sigma ** 2)
    for theta in thetas:
        spikes = SpikeSet.from_pairs([(theta, 1)])
        pred, = predict(model, spikes, n=args.n)
        a = build_perturbation(nu, args.n, spikes)
        top = []
        for t in range(args.trials):
            m = assemble(DeformedEnsemble(args.n, dist, a, args.seed + t))
            top.append(eigenvalues_sorted(m)[pred.ranks[0] - 1])
        obs = statistics.median(top)
        print(f'  {theta:8.3f} {pred.case_tag.kind:>12s} {pred.limit:10.5f} {obs:10.5f} '
              f'{abs(obs - pred.limit):8.4f}')


if __name__ == '__main__':
    main()
