"""
Classification of spiked eigenvalues and their predicted limits.

A spike ``theta`` of the deformation matrix is either

* an outlier generator (``theta`` off the closure of ``U``): the
  corresponding eigenvalues converge to ``H(theta)`` outside the support;
* an edge spike: it sits in a component ``[s, t]`` of the closure of ``U``
  with no support of ``nu`` on one side, and the eigenvalues stick to
  ``Psi(t)`` (or ``Psi(s)``);
* a bulk spike: it sits between two support components of ``nu`` inside one
  component of the closure of ``U``, and the eigenvalues converge to the
  quantile of level ``nu((-inf, theta])`` of the free convolution.

Component indices ``l`` are 0-based in ascending order.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy

from .errors import DomainError
from .measure import cdf, discretize_quantiles, support_components

__all__ = [
    'SpikeSet', 'CaseTag', 'SpikePrediction', 'classify_spike', 'predict',
    'separation_image', 'outlier_points',
]

BOUNDARY_TOL = 1e-12
K_BAND = 1e-9

OUTLIER = 'outlier'
EDGE_RIGHT = 'edge_right'
EDGE_LEFT = 'edge_left'
BULK = 'bulk_quantile'


@dataclass(frozen=True)
class SpikeSet:
    """Spikes ``(theta, multiplicity)`` with strictly decreasing ``theta``."""

    entries: tuple = ()

    def __post_init__(self):
        entries = tuple((float(t), int(k)) for t, k in self.entries)
        object.__setattr__(self, 'entries', entries)
        for t, k in entries:
            if k < 1:
                raise ValueError(f'multiplicity must be positive, got {k}')
            if not numpy.isfinite(t):
                raise ValueError('spikes must be finite')
        thetas = [t for t, _ in entries]
        if any(a <= b for a, b in zip(thetas, thetas[1:])):
            raise ValueError('spikes must be strictly decreasing')

    @classmethod
    def from_pairs(cls, pairs):
        """Accept pairs in any order; sorts them descending."""
        pairs = sorted(((float(t), int(k)) for t, k in pairs), reverse=True)
        return cls(tuple(pairs))

    @property
    def rank(self):
        return sum(k for _, k in self.entries)

    @property
    def thetas(self):
        return [t for t, _ in self.entries]

    def expanded(self):
        """Spike values repeated by multiplicity, descending."""
        return [t for t, k in self.entries for _ in range(k)]


@dataclass(frozen=True)
class CaseTag:
    kind: str
    component: Optional[int] = None
    alpha: Optional[float] = None

    def to_dict(self):
        out = {'case': self.kind}
        if self.component is not None:
            out['component'] = self.component
        if self.alpha is not None:
            out['alpha'] = self.alpha
        return out


@dataclass(frozen=True)
class SpikePrediction:
    theta: float
    multiplicity: int
    case_tag: CaseTag
    limit: float
    ranks: list = field(default_factory=list)

    def to_dict(self):
        out = {'theta': self.theta, 'multiplicity': self.multiplicity}
        out.update(self.case_tag.to_dict())
        out['limit'] = self.limit
        out['ranks'] = list(self.ranks)
        return out


def classify_spike(model, theta):
    """
    Case of a single spike.

    Raises
    ------
    DomainError
        ``theta`` lies in the support of ``nu`` or on a boundary point of
        the closure of ``U``, where the limit theorem says nothing.
    """
    theta = float(theta)
    if model.nu.contains(theta):
        raise DomainError(f'spike {theta} lies in the support of nu')
    for l, (s, t) in enumerate(model.u_components):
        for b in (s, t):
            if abs(theta - b) <= BOUNDARY_TOL * max(1.0, abs(b)):
                raise DomainError(
                    f'spike {theta} lies on the boundary point {b} of '
                    f'component {l} of closure(U)')
    for l, (s, t) in enumerate(model.u_components):
        if s <= theta <= t:
            inner = [c for c in support_components(model.nu)
                     if s <= c[0] and c[1] <= t]
            assert inner, 'component of closure(U) without support'
            right = any(c[0] > theta for c in inner)
            left = any(c[1] < theta for c in inner)
            if not right:
                return CaseTag(EDGE_RIGHT, component=l)
            if not left:
                return CaseTag(EDGE_LEFT, component=l)
            return CaseTag(BULK, component=l, alpha=float(cdf(model.nu, theta)))
    return CaseTag(OUTLIER)


def _limit(model, theta, tag):
    if tag.kind == OUTLIER:
        return float(model.big_h(theta))
    if tag.kind == EDGE_RIGHT:
        return float(model.support[tag.component][1])
    if tag.kind == EDGE_LEFT:
        return float(model.support[tag.component][0])
    return float(model.free_quantile(tag.alpha))


def predict(model, spikes, n=None, bulk=None):
    """
    Case, limit and descending ranks for every spike.

    Ranks count the eigenvalues of the deformation strictly above ``theta``
    (bulk values and the other spikes), so they stay exact when a spike is
    interleaved with the bulk. Without ``n`` the ranks are left empty; with
    ``n`` but no ``bulk``, the bulk is the quantile discretization of ``nu``
    with ``n - r`` points.
    """
    if bulk is None and n is not None:
        bulk = discretize_quantiles(model.nu, n - spikes.rank)
    spectrum = None
    if bulk is not None:
        spectrum = numpy.concatenate((numpy.asarray(bulk, dtype=float),
                                      numpy.asarray(spikes.expanded(), dtype=float)))
    out = []
    for theta, k in spikes.entries:
        tag = classify_spike(model, theta)
        ranks = []
        if spectrum is not None:
            above = int(numpy.sum(spectrum > theta))
            ranks = list(range(above + 1, above + k + 1))
        out.append(SpikePrediction(theta, k, tag, _limit(model, theta, tag), ranks))
    return out


def outlier_points(model, spikes):
    """Limits ``H(theta)`` of the outlier-generating spikes."""
    if spikes is None:
        return []
    return [float(model.big_h(t)) for t in spikes.thetas
            if classify_spike(model, t).kind == OUTLIER]


def separation_image(model, a, b, spikes=None):
    """
    Preimages ``(F(a), F(b))`` of a gap ``[a, b]`` of the limiting spectrum
    under the subordination function.

    ``[a, b]`` must avoid the support and every outlier limit by a margin
    of ``1e-9``. For large matrices the number of eigenvalues of the
    deformed model above ``b`` then equals the number of eigenvalues of the
    deformation above ``F(b)``.
    """
    a, b = float(a), float(b)
    if not a < b:
        raise DomainError('gap needs a < b')
    for lo, hi in model.support:
        if a <= hi + K_BAND and b >= lo - K_BAND:
            raise DomainError(f'gap [{a}, {b}] meets the support interval [{lo}, {hi}]')
    for rho in outlier_points(model, spikes):
        if a - K_BAND <= rho <= b + K_BAND:
            raise DomainError(f'gap [{a}, {b}] contains the outlier limit {rho}')
    a_prime, b_prime = float(model.f_inverse(a)), float(model.f_inverse(b))
    assert a_prime < b_prime
    return a_prime, b_prime
