"""
Support, component masses and density of the free convolution for the
analytic fixtures, checked against the fixed-point oracle.

    python scripts/density_table.py --points 9
"""

import argparse
import math

import numpy

from spikedwigner.measure import Measure
from spikedwigner.subord import SubordModel

FIXTURES = {
    'delta_0, sigma=1': (Measure.atom(0.0), 1.0),
    'Uniform[-1,1], sigma=1': (Measure.uniform(-1.0, 1.0), 1.0),
    '(d_-1 + d_1)/2, sigma=2': (Measure.atoms([-1.0, 1.0]), 2.0),
    '(d_-1 + d_1)/2, sigma=0.3': (Measure.atoms([-1.0, 1.0]), 0.3),
    'd_-3/4 + 3 d_3/4, sigma=0.5': (Measure.atoms([-3.0, 3.0], [0.25, 0.75]), 0.5),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.split('\n\n')[0])
    parser.add_argument('--points', type=int, default=7, help='grid points per interval')
    parser.add_argument('--eta', type=float, default=1e-4,
                        help='distance from the real axis for the oracle')
    args = parser.parse_args()

    for name, (nu, sigma) in FIXTURES.items():
        model = SubordModel.build(nu, sigma)
        print(f'== {name}')
        for (s, t), (lo, hi), w in zip(model.u_components, model.support,
                                       model.component_masses):
            print(f'   U-component [{s:+.9f}, {t:+.9f}] -> support [{lo:+.9f}, {hi:+.9f}]'
                  f'  mass {w:.6f}')
        print(f"   {'x':>10s} {'density':>12s} {'oracle':>12s} {'cdf':>10s}")
        for lo, hi in model.support:
            x = numpy.linspace(lo, hi, args.points + 2)[1:-1]
            dens = numpy.asarray(model.free_density(x))
            oracle = -numpy.asarray(model.fixed_point_g(x + 1j * args.eta)).imag / math.pi
            cdf = numpy.asarray(model.free_cdf(x))
            for row in zip(x, dens, oracle, cdf):
                print('   {:+10.5f} {:12.8f} {:12.8f} {:10.6f}'.format(*row))


if __name__ == '__main__':
    main()
