"""
Eigenvalues of deformed Wigner matrices and the checks that compare them
with the free-probability predictions.
"""

from dataclasses import asdict, dataclass, field

import numpy

from .eigen import hermitian_eigenvalues
from .errors import RankError
from .spikes import OUTLIER, separation_image

__all__ = [
    'eigenvalues_sorted', 'ks_distance', 'check_outliers', 'check_separation',
    'check_inclusion', 'OutlierCheck', 'SeparationCheck', 'SpectrumReport',
    'write_eigenvalues',
]

HERMITIAN_TOL = 1e-12


def eigenvalues_sorted(m, method='householder'):
    """
    All eigenvalues of a Hermitian matrix, descending.

    ``method='householder'`` runs the in-repo tridiagonal reduction and QL
    iteration; ``'lapack'`` defers to ``numpy.linalg.eigvalsh`` and exists
    only for cross-checks.
    """
    m = numpy.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError('expected a square matrix')
    if numpy.max(numpy.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError('matrix is not Hermitian')
    if method == 'householder':
        return hermitian_eigenvalues(m)
    if method == 'lapack':
        return numpy.linalg.eigvalsh(m)[::-1]
    raise ValueError(f'unknown eigen method {method!r}')


def write_eigenvalues(path, eigs):
    """Eigenvalue dump: one value per line, descending."""
    eigs = numpy.sort(numpy.asarray(eigs, dtype=float))[::-1]
    with open(path, 'w') as f:
        f.writelines(f'{float(e)!r}\n' for e in eigs)


def ks_distance(eigs, model):
    """Kolmogorov-Smirnov distance between the empirical law of ``eigs`` and
    the free convolution."""
    x = numpy.sort(numpy.asarray(eigs, dtype=float))
    n = x.size
    if n == 0:
        return 0.0
    f = numpy.asarray(model.free_cdf(x))
    i = numpy.arange(1, n + 1)
    return float(max(numpy.max(i / n - f), numpy.max(f - (i - 1) / n)))


@dataclass
class OutlierCheck:
    theta: float
    case: str
    ranks: list
    predicted: float
    observed: list
    abs_error: float
    match: bool


def check_outliers(eigs, predictions, tol):
    """
    Compare eigenvalues at each spike's descending ranks with its predicted
    limit. ``abs_error`` is the worst rank of the spike.
    """
    eigs = numpy.asarray(eigs, dtype=float)
    n = eigs.size
    out = []
    for p in predictions:
        if not p.ranks or max(p.ranks) > n or min(p.ranks) < 1:
            raise RankError(f'ranks {p.ranks} invalid for {n} eigenvalues')
        observed = [float(eigs[r - 1]) for r in p.ranks]
        err = max(abs(o - p.limit) for o in observed)
        out.append(OutlierCheck(p.theta, p.case_tag.kind, list(p.ranks),
                                p.limit, observed, err, bool(err <= tol)))
    return out


@dataclass
class SeparationCheck:
    a: float
    b: float
    a_prime: float
    b_prime: float
    count_m_above_b: int
    count_a_above_b_prime: int
    gap_empty: bool
    match: bool


def check_separation(eigs_m, a_spectrum, model, gaps, spikes=None):
    """Exact separation: a gap ``[a, b]`` of the limit splits the deformed
    spectrum as ``[F(a), F(b)]`` splits the deformation."""
    eigs_m = numpy.asarray(eigs_m, dtype=float)
    a_spectrum = numpy.asarray(a_spectrum, dtype=float)
    out = []
    for a, b in gaps:
        a_prime, b_prime = separation_image(model, a, b, spikes)
        count_m = int(numpy.sum(eigs_m > b))
        count_a = int(numpy.sum(a_spectrum > b_prime))
        empty = not numpy.any((eigs_m >= a) & (eigs_m <= b))
        out.append(SeparationCheck(float(a), float(b), a_prime, b_prime,
                                   count_m, count_a, bool(empty),
                                   bool(empty and count_m == count_a)))
    return out


def check_inclusion(eigs, model, predictions, epsilon):
    """Number of eigenvalues farther than ``epsilon`` from the support and
    from every outlier limit."""
    x = numpy.asarray(eigs, dtype=float)
    dist = numpy.full(x.shape, numpy.inf)
    for lo, hi in model.support:
        dist = numpy.minimum(dist, numpy.maximum(numpy.maximum(lo - x, x - hi), 0.0))
    for p in predictions:
        if p.case_tag.kind == OUTLIER:
            dist = numpy.minimum(dist, numpy.abs(x - p.limit))
    return int(numpy.sum(dist > epsilon))


@dataclass
class SpectrumReport:
    eigenvalues: list
    ks_distance: float
    outlier_errors: list = field(default_factory=list)
    separation: list = field(default_factory=list)
    inclusion_violations: int = 0
    seed: int = None

    def to_dict(self):
        return {
            'seed': self.seed,
            'eigenvalues': [float(e) for e in self.eigenvalues],
            'ks_distance': self.ks_distance,
            'outlier_errors': [asdict(o) for o in self.outlier_errors],
            'separation': [asdict(s) for s in self.separation],
            'inclusion_violations': self.inclusion_violations,
        }
