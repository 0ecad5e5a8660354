"""
Compactly supported probability measures built from atoms and uniform
pieces, with closed-form integral transforms.

All transforms accept scalars or arrays and broadcast like numpy ufuncs.
"""

from dataclasses import dataclass
import json
import math

import numpy

from .errors import DomainError, RangeError

__all__ = [
    'Atom', 'Uniform', 'Measure', 'stieltjes', 'stieltjes_deriv',
    'inv_square_mass', 'real_kernel', 'log_potential_imag', 'cdf',
    'quantile', 'support_components', 'discretize_quantiles',
]

WEIGHT_TOL = 1e-12
PARSE_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class Atom:
    x: float
    w: float


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float
    w: float


@dataclass(frozen=True)
class Measure:
    """
    Finite mixture of point masses and uniform densities.

    Parameters
    ----------
    pieces : tuple of Atom or Uniform
        Components; weights must be positive and sum to one.
    """

    pieces: tuple

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, 'pieces', pieces)
        if not pieces:
            raise ValueError('a measure needs at least one piece')
        total = 0.0
        for p in pieces:
            if not (p.w > 0 and math.isfinite(p.w)):
                raise ValueError(f'weights must be positive, got {p.w!r}')
            if isinstance(p, Uniform):
                if not (math.isfinite(p.a) and math.isfinite(p.b)
                        and p.a < p.b):
                    raise ValueError(f'uniform piece needs a < b: {p!r}')
            elif isinstance(p, Atom):
                if not math.isfinite(p.x):
                    raise ValueError(f'atom location must be finite: {p!r}')
            else:
                raise TypeError(f'unknown piece {p!r}')
            total += p.w
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f'weights sum to {total!r}, not 1')

        atoms = [p for p in pieces if isinstance(p, Atom)]
        unif = [p for p in pieces if isinstance(p, Uniform)]
        for name, vals in (('_ax', [p.x for p in atoms]),
                           ('_aw', [p.w for p in atoms]),
                           ('_ua', [p.a for p in unif]),
                           ('_ub', [p.b for p in unif]),
                           ('_uw', [p.w for p in unif])):
            object.__setattr__(self, name, numpy.array(vals, dtype=float))

    # constructors

    @classmethod
    def atom(cls, x=0.0):
        return cls((Atom(float(x), 1.0),))

    @classmethod
    def uniform(cls, a, b):
        return cls((Uniform(float(a), float(b), 1.0),))

    @classmethod
    def atoms(cls, locations, weights=None):
        locations = list(locations)
        if weights is None:
            weights = [1.0 / len(locations)] * len(locations)
        return cls(tuple(Atom(float(x), float(w))
                         for x, w in zip(locations, weights)))

    @classmethod
    def from_dict(cls, spec):
        """
        Parse ``{"pieces": [{"kind": "atom", "x": .., "w": ..},
        {"kind": "uniform", "a": .., "b": .., "w": ..}]}``.

        Weights are renormalized after checking they sum to one within
        ``1e-9``.
        """
        try:
            raw = spec['pieces']
            parsed = []
            for item in raw:
                kind = item['kind']
                if kind == 'atom':
                    parsed.append(('atom', float(item['x']), float(item['w'])))
                elif kind == 'uniform':
                    parsed.append(('uniform', float(item['a']),
                                   float(item['b']), float(item['w'])))
                else:
                    raise ValueError(f'unknown piece kind {kind!r}')
        except (KeyError, TypeError) as exc:
            raise ValueError(f'malformed measure spec: {exc!r}') from exc
        total = sum(p[-1] for p in parsed)
        if abs(total - 1.0) > PARSE_WEIGHT_TOL:
            raise ValueError(f'measure weights sum to {total!r}, not 1')
        pieces = []
        for p in parsed:
            if p[0] == 'atom':
                pieces.append(Atom(p[1], p[2] / total))
            else:
                pieces.append(Uniform(p[1], p[2], p[3] / total))
        return cls(tuple(pieces))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        out = []
        for p in self.pieces:
            if isinstance(p, Atom):
                out.append({'kind': 'atom', 'x': p.x, 'w': p.w})
            else:
                out.append({'kind': 'uniform', 'a': p.a, 'b': p.b, 'w': p.w})
        return {'pieces': out}

    # support helpers

    def contains(self, x):
        """Boolean mask: ``x`` lies in the (closed) support."""
        x = numpy.asarray(x, dtype=float)
        hit = numpy.zeros(x.shape, dtype=bool)
        for loc in self._ax:
            hit |= x == loc
        for a, b in zip(self._ua, self._ub):
            hit |= (x >= a) & (x <= b)
        return hit

    def mass(self, lo, hi):
        """Measure of the closed interval ``[lo, hi]``."""
        total = 0.0
        for x, w in zip(self._ax, self._aw):
            if lo <= x <= hi:
                total += w
        for a, b, w in zip(self._ua, self._ub, self._uw):
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0:
                total += w * overlap / (b - a)
        return total

    @property
    def bounds(self):
        comps = support_components(self)
        return comps[0][0], comps[-1][1]


def _out(x):
    if numpy.ndim(x) == 0 and hasattr(x, 'item'):
        return x.item()
    return x


def _check_outside(nu, u):
    if numpy.any(nu.contains(u)):
        raise DomainError('real argument lies in the support of the measure')


def inv_square_mass(nu, u, v):
    """
    Integral of ``1 / ((u - x)^2 + v^2)`` against ``nu``.

    For ``v = 0`` this is ``+inf`` at atoms and on uniform pieces, including
    their endpoints, where the integral diverges.
    """
    u = numpy.asarray(u, dtype=float)
    v = numpy.abs(numpy.asarray(v, dtype=float))
    u, v = numpy.broadcast_arrays(u, v)
    out = numpy.zeros(u.shape)
    pos = v > 0
    vs = numpy.where(pos, v, 1.0)
    with numpy.errstate(divide='ignore', invalid='ignore'):
        for x, w in zip(nu._ax, nu._aw):
            out = out + w / ((u - x) ** 2 + v ** 2)
        for a, b, w in zip(nu._ua, nu._ub, nu._uw):
            # arctan((u-a)/v) - arctan((u-b)/v) rewritten to avoid cancellation
            ang = numpy.arctan2((b - a) * vs, vs ** 2 + (u - a) * (u - b))
            inner = (u - a) * (u - b)
            zero_v = numpy.where(inner > 0, 1.0 / inner, numpy.inf)
            out = out + w * numpy.where(pos, ang / ((b - a) * vs), zero_v)
    return _out(out)


def real_kernel(nu, u, v):
    """Integral of ``(u - x) / ((u - x)^2 + v^2)``, the real part of g(u+iv)."""
    u = numpy.asarray(u, dtype=float)
    v = numpy.asarray(v, dtype=float)
    u, v = numpy.broadcast_arrays(u, v)
    out = numpy.zeros(u.shape)
    with numpy.errstate(divide='ignore', invalid='ignore'):
        for x, w in zip(nu._ax, nu._aw):
            out = out + w * (u - x) / ((u - x) ** 2 + v ** 2)
        for a, b, w in zip(nu._ua, nu._ub, nu._uw):
            out = out + (w / (b - a)) * (
                numpy.log(numpy.hypot(u - a, v))
                - numpy.log(numpy.hypot(u - b, v)))
    return _out(out)


def stieltjes(nu, z):
    """
    Cauchy-Stieltjes transform ``g(z) = int dnu(x) / (z - x)``.

    Real ``z`` must lie off the support; the result is then real.
    """
    z = numpy.asarray(z)
    if not numpy.iscomplexobj(z):
        z = z.astype(float)
        _check_outside(nu, z)
        return _out(real_kernel(nu, z, 0.0))
    u, v = z.real, z.imag
    on_axis = v == 0
    if numpy.any(on_axis):
        _check_outside(nu, u[on_axis] if u.ndim else u)
    re = numpy.asarray(real_kernel(nu, u, v))
    im = -v * numpy.asarray(inv_square_mass(nu, u, v))
    im = numpy.where(on_axis, 0.0, im)
    return _out(re + 1j * im)


def stieltjes_deriv(nu, u):
    """``g'(u) = -int dnu(x) / (u - x)^2`` for real ``u`` off the support."""
    u = numpy.asarray(u, dtype=float)
    _check_outside(nu, u)
    return _out(-numpy.asarray(inv_square_mass(nu, u, 0.0)))


def log_potential_imag(nu, u, v):
    """
    Imaginary part of ``int log(z - x) dnu(x)`` at ``z = u + iv``, ``v >= 0``,
    principal branch, boundary value from above when ``v = 0``.

    Equals ``pi * nu((u, inf))`` on the real axis.
    """
    u = numpy.asarray(u, dtype=float)
    v = numpy.asarray(v, dtype=float) + 0.0  # normalizes -0.0
    u, v = numpy.broadcast_arrays(u, v)
    out = numpy.zeros(u.shape)
    with numpy.errstate(divide='ignore', invalid='ignore'):
        for x, w in zip(nu._ax, nu._aw):
            out = out + w * numpy.arctan2(v, u - x)
        for a, b, w in zip(nu._ua, nu._ub, nu._uw):
            ra = numpy.hypot(u - a, v)
            rb = numpy.hypot(u - b, v)
            la = numpy.where(ra > 0, v * numpy.log(numpy.where(ra > 0, ra, 1.0)), 0.0)
            lb = numpy.where(rb > 0, v * numpy.log(numpy.where(rb > 0, rb, 1.0)), 0.0)
            term = ((u - a) * numpy.arctan2(v, u - a) + la
                    - (u - b) * numpy.arctan2(v, u - b) - lb)
            out = out + (w / (b - a)) * term
    return _out(out)


def cdf(nu, x):
    """Right-continuous distribution function ``nu((-inf, x])``."""
    x = numpy.asarray(x, dtype=float)
    out = numpy.zeros(x.shape)
    for loc, w in zip(nu._ax, nu._aw):
        out = out + w * (x >= loc)
    for a, b, w in zip(nu._ua, nu._ub, nu._uw):
        out = out + w * numpy.clip((x - a) / (b - a), 0.0, 1.0)
    return _out(numpy.minimum(out, 1.0))


def _breakpoints(nu):
    pts = set(nu._ax.tolist()) | set(nu._ua.tolist()) | set(nu._ub.tolist())
    return numpy.array(sorted(pts))


def _quantile_scalar(nu, alpha, pts, right, left):
    if alpha == 0.0:
        return float(pts[0])
    for k in range(len(pts)):
        if right[k] >= alpha:
            if k > 0 and left[k] >= alpha > right[k - 1]:
                # continuous, linear stretch between breakpoints
                lo, hi = pts[k - 1], pts[k]
                frac = (alpha - right[k - 1]) / (left[k] - right[k - 1])
                return float(lo + frac * (hi - lo))
            return float(pts[k])
    return float(pts[-1])


def quantile(nu, alpha):
    """Generalized inverse ``inf{x : cdf(x) >= alpha}``; ``alpha=0`` gives the
    left end of the support."""
    alpha = numpy.asarray(alpha, dtype=float)
    if numpy.any((alpha < 0) | (alpha > 1)) or numpy.any(numpy.isnan(alpha)):
        raise RangeError('quantile level must lie in [0, 1]')
    pts = _breakpoints(nu)
    right = numpy.asarray(cdf(nu, pts))
    # left limits differ from right values only at atoms
    left = numpy.array([right[k] - sum(w for x, w in zip(nu._ax, nu._aw)
                                       if x == pts[k])
                        for k in range(len(pts))])
    flat = alpha.ravel()
    res = numpy.array([_quantile_scalar(nu, a, pts, right, left) for a in flat])
    return _out(res.reshape(alpha.shape))


def support_components(nu):
    """Minimal ordered list of disjoint closed intervals covering the
    support; isolated atoms give degenerate ``[x, x]``."""
    spans = sorted([(float(x), float(x)) for x in nu._ax]
                   + [(float(a), float(b)) for a, b in zip(nu._ua, nu._ub)])
    merged = []
    for lo, hi in spans:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [tuple(c) for c in merged]


def discretize_quantiles(nu, n):
    """Midpoint quantiles ``quantile((j - 1/2) / n)``, ``j = 1..n``, ascending."""
    if n < 1:
        raise ValueError('n must be positive')
    levels = (numpy.arange(1, n + 1) - 0.5) / n
    return numpy.sort(numpy.asarray(quantile(nu, levels), dtype=float))
