"""
Deformed Wigner matrices ``M = W / sqrt(n) + A`` with seeded sampling.

Randomness comes from numpy's PCG64 bit generator, one stream per seed;
trial ``i`` of a run with base seed ``s`` uses seed ``s + i``.
"""

from dataclasses import dataclass, field
import math

import numpy

from .errors import SizeError
from .measure import discretize_quantiles

__all__ = [
    'RNG_NAME', 'EntryDist', 'DeformedEnsemble', 'make_rng', 'sample_wigner',
    'haar_unitary', 'build_perturbation', 'assemble',
]

RNG_NAME = 'numpy.random.PCG64'

GAUSSIAN = 'gaussian'
UNIFORM = 'uniform_symmetric'
RADEMACHER = 'rademacher'
SUPPORTED = (GAUSSIAN, UNIFORM)


@dataclass(frozen=True)
class EntryDist:
    """
    Symmetric entry law with variance ``variance``.

    Gaussian and symmetric-uniform laws satisfy a Poincare inequality.
    Rademacher entries do not, and are only accepted with
    ``outside_hypothesis=True``.
    """

    tag: str = GAUSSIAN
    variance: float = 1.0
    outside_hypothesis: bool = False

    def __post_init__(self):
        tag = self.tag.lower()
        if tag in ('uniform', 'uniformsymmetric'):
            tag = UNIFORM
        object.__setattr__(self, 'tag', tag)
        if not self.variance > 0:
            raise ValueError('entry variance must be positive')
        if tag == RADEMACHER and not self.outside_hypothesis:
            raise ValueError('rademacher entries need outside_hypothesis=True')
        if tag not in SUPPORTED + (RADEMACHER,):
            raise ValueError(f'unknown entry distribution {self.tag!r}')

    @property
    def sigma(self):
        return math.sqrt(self.variance)

    @property
    def uniform_halfwidth(self):
        # uniform on [-c, c] has variance c^2 / 3
        return math.sqrt(3.0 * self.variance)

    def sample(self, rng, size):
        if self.tag == GAUSSIAN:
            return rng.normal(0.0, self.sigma, size)
        if self.tag == UNIFORM:
            c = self.uniform_halfwidth
            return rng.uniform(-c, c, size)
        return self.sigma * rng.choice((-1.0, 1.0), size)

    def to_dict(self):
        out = {'tag': self.tag, 'variance': self.variance}
        if self.outside_hypothesis:
            out['outside_hypothesis'] = True
        return out


def make_rng(seed):
    return numpy.random.Generator(numpy.random.PCG64(int(seed)))


def sample_wigner(n, dist, seed):
    """
    Hermitian Wigner matrix: real diagonal entries drawn from ``dist``,
    real and imaginary parts above the diagonal drawn from ``dist`` and
    scaled by ``1/sqrt(2)``, so ``E|W_ij|^2`` equals the variance.
    """
    if n < 1:
        raise ValueError('n must be positive')
    rng = seed if isinstance(seed, numpy.random.Generator) else make_rng(seed)
    diag = dist.sample(rng, n)
    re = dist.sample(rng, (n, n))
    im = dist.sample(rng, (n, n))
    upper = numpy.triu((re + 1j * im) / math.sqrt(2.0), 1)
    w = upper + upper.conj().T
    w[numpy.diag_indices(n)] = diag
    return w


def haar_unitary(n, rng):
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = numpy.linalg.qr(z)
    d = numpy.diagonal(r)
    return q * (d / numpy.abs(d))


def build_perturbation(nu, n, spikes):
    """Spectrum of the deformation: ``n - r`` midpoint quantiles of ``nu``
    plus every spike repeated by its multiplicity, descending."""
    r = spikes.rank if spikes is not None else 0
    if n <= r:
        raise SizeError(f'matrix size {n} must exceed the spike rank {r}')
    bulk = discretize_quantiles(nu, n - r)
    extra = spikes.expanded() if spikes is not None else []
    return numpy.sort(numpy.concatenate((bulk, extra)))[::-1]


@dataclass(frozen=True)
class DeformedEnsemble:
    n: int
    dist: EntryDist
    a_spectrum: numpy.ndarray = field(repr=False)
    seed: int = 0
    rotate: bool = False

    def __post_init__(self):
        a = numpy.asarray(self.a_spectrum, dtype=float)
        if a.shape != (self.n,):
            raise ValueError('a_spectrum must have length n')
        if numpy.any(numpy.diff(a) > 0):
            raise ValueError('a_spectrum must be sorted descending')
        object.__setattr__(self, 'a_spectrum', a)


def assemble(ens, noise=None):
    """
    ``M = W / sqrt(n) + A`` with ``A = diag(a_spectrum)``.

    ``noise`` replaces the sampled ``W`` (for instance a zero matrix in
    tests). With ``ens.rotate`` the deformation is conjugated by a Haar
    unitary drawn from a stream independent of ``W``.
    """
    n = ens.n
    w = sample_wigner(n, ens.dist, ens.seed) if noise is None else numpy.asarray(noise)
    m = w / math.sqrt(n)
    if ens.rotate:
        rng = numpy.random.Generator(
            numpy.random.PCG64(numpy.random.SeedSequence(ens.seed, spawn_key=(1,))))
        u = haar_unitary(n, rng)
        a = (u * ens.a_spectrum) @ u.conj().T
        a = 0.5 * (a + a.conj().T)
        m = m + a
    else:
        m = m.astype(complex, copy=True)
        m[numpy.diag_indices(n)] += ens.a_spectrum
    return m
