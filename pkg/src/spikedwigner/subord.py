"""
Free additive convolution of a measure with a semicircle law.

The convolution ``mu_sigma [+] nu`` is described through the map
``H(z) = z + sigma^2 g_nu(z)`` and the curve ``u + i v(u)`` on which
``H`` is real. Points ``u`` where ``v(u) > 0`` form the open set ``U``;
``Psi(u) = H(u + i v(u))`` maps the closure of ``U`` onto the support and
the density at ``Psi(u)`` is ``v(u) / (pi sigma^2)``.

Every query on a :class:`SubordModel` is vectorized over its argument.
"""

from dataclasses import dataclass, field
import math

import numpy

from .errors import ConvergenceError, DomainError, RangeError, ResolutionError
from .measure import (
    Measure, inv_square_mass, log_potential_imag, real_kernel, stieltjes,
    support_components,
)
from .quadrature import adaptive_simpson

__all__ = ['SubordModel', 'compute_u_components', 'DEFAULT_RESOLUTION']

DEFAULT_RESOLUTION = 4096
MIN_BOUNDARY_STEPS = 4
BOUNDARY_TOL = 1e-13
V_TOL = 1e-12
U_TOL = 1e-12


def _out(x):
    if numpy.ndim(x) == 0 and hasattr(x, 'item'):
        return x.item()
    return x


def _bisect_boundary(h, outside, inside, tol=BOUNDARY_TOL):
    # h(outside) <= 0 < h(inside); returns a point with h <= 0.
    while abs(inside - outside) > tol:
        mid = 0.5 * (outside + inside)
        if mid == outside or mid == inside:
            break
        if h(mid) > 0:
            inside = mid
        else:
            outside = mid
    return outside


def _convex_min(h, lo, hi, iters=200):
    # golden-section search for the minimum of a convex function on (lo, hi)
    r = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - r * (b - a), a + r * (b - a)
    fc, fd = h(c), h(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = h(c)
        else:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = h(d)
        if b - a < 1e-15 * max(1.0, abs(a)):
            break
    return (c, fc) if fc < fd else (d, fd)


def compute_u_components(nu, sigma, resolution=DEFAULT_RESOLUTION):
    """
    Connected components ``[s, t]`` of the closure of
    ``U = {u : int dnu(x) / (u - x)^2 > 1 / sigma^2}``, ascending.

    The neighbourhood ``supp(nu) + [-sigma, sigma]`` is scanned on a grid
    with ``resolution`` points per unit length and every sign change of
    ``h(u) = int dnu/(u-x)^2 - 1/sigma^2`` is refined by bisection. Support
    endpoints are always grid points, so each component is seen at least
    once. Returned endpoints satisfy ``h <= 0``, so ``v`` vanishes there.

    Raises
    ------
    ResolutionError
        Two boundaries are closer than four grid steps, or a gap of ``U``
        between two support components falls between grid points.
    """
    if not sigma > 0:
        raise ValueError('sigma must be positive')
    inv = 1.0 / sigma ** 2

    def h(u):
        return inv_square_mass(nu, u, 0.0) - inv

    step = 1.0 / resolution
    pad = MIN_BOUNDARY_STEPS * step
    supp = support_components(nu)

    windows = []
    for lo, hi in supp:
        lo, hi = lo - sigma - pad, hi + sigma + pad
        if windows and lo <= windows[-1][1]:
            windows[-1][1] = max(windows[-1][1], hi)
        else:
            windows.append([lo, hi])

    ends = numpy.array([x for c in supp for x in c])
    boundaries = []
    for lo, hi in windows:
        m = int(math.ceil((hi - lo) / step)) + 1
        grid = numpy.union1d(numpy.linspace(lo, hi, m),
                             ends[(ends >= lo) & (ends <= hi)])
        inside = numpy.asarray(h(grid)) > 0
        for i in numpy.flatnonzero(inside[1:] != inside[:-1]):
            a, b = float(grid[i]), float(grid[i + 1])
            if inside[i]:
                boundaries.append(_bisect_boundary(h, b, a))
            else:
                boundaries.append(_bisect_boundary(h, a, b))

    gaps = numpy.diff(boundaries)
    if len(gaps) and gaps.min() < MIN_BOUNDARY_STEPS * step:
        raise ResolutionError(
            f'two boundaries of U lie {gaps.min():.3g} apart, closer than '
            f'{MIN_BOUNDARY_STEPS} grid steps; raise --resolution '
            f'(currently {resolution})')

    comps = [(boundaries[i], boundaries[i + 1])
             for i in range(0, len(boundaries), 2)]

    # h is strictly convex between consecutive support components; a dip
    # below zero that the grid stepped over means a missed gap.
    for (_, p), (q, _) in zip(supp[:-1], supp[1:]):
        owner = [c for c in comps if c[0] <= p and q <= c[1]]
        if not owner:
            continue
        _, hmin = _convex_min(h, p, q)
        if hmin <= 0:
            raise ResolutionError(
                f'U has a gap inside ({p}, {q}) that the scan grid missed; '
                f'raise --resolution (currently {resolution})')
    return comps


@dataclass(frozen=True)
class SubordModel:
    """
    Curve parametrization of ``mu_sigma [+] nu``.

    Build with :meth:`build`; the components of the closure of ``U``, the
    support intervals ``[Psi(s), Psi(t)]`` and the masses ``nu([s, t])``
    are computed once and the object is immutable afterwards.
    """

    nu: Measure
    sigma: float
    u_components: tuple
    support: tuple
    component_masses: tuple
    resolution: int = DEFAULT_RESOLUTION
    _cum: numpy.ndarray = field(default=None, repr=False, compare=False)

    @classmethod
    def build(cls, nu, sigma, resolution=DEFAULT_RESOLUTION):
        sigma = float(sigma)
        comps = compute_u_components(nu, sigma, resolution)
        proto = cls(nu, sigma, tuple(comps), (), (), resolution)
        support = tuple((proto.psi(s), proto.psi(t)) for s, t in comps)
        masses = tuple(float(nu.mass(s, t)) for s, t in comps)
        model = cls(nu, sigma, tuple(comps), support, masses, resolution,
                    numpy.concatenate(([0.0], numpy.cumsum(masses))))
        model._check_invariants()
        return model

    def _check_invariants(self):
        supp = support_components(self.nu)
        for lo, hi in supp:
            assert any(s <= lo and hi <= t for s, t in self.u_components), \
                'support component outside closure(U)'
        for s, t in self.u_components:
            assert any(s <= lo and hi <= t for lo, hi in supp), \
                'component of closure(U) without support'
            for u in (s, t):
                dist = min(max(lo - u, u - hi, 0.0) for lo, hi in supp)
                assert dist <= self.sigma + 1e-9, 'closure(U) too far from support'
        for (_, q), (p, _) in zip(self.support[:-1], self.support[1:]):
            assert q < p, 'support intervals overlap'
        assert abs(sum(self.component_masses) - 1.0) < 1e-8

    # pointwise maps

    def v_at(self, u):
        """
        Height ``v(u)`` of the curve: 0 if ``int dnu/(u-x)^2 <= 1/sigma^2``,
        else the root in ``(0, sigma]`` of ``int dnu/((u-x)^2+v^2) = 1/sigma^2``.
        """
        u = numpy.asarray(u, dtype=float)
        inv = 1.0 / self.sigma ** 2
        out = numpy.zeros(u.shape)
        active = numpy.asarray(inv_square_mass(self.nu, u, 0.0)) > inv
        if numpy.any(active):
            uu = u[active]
            lo = numpy.zeros(uu.shape)
            hi = numpy.full(uu.shape, self.sigma)
            # mass <= 1/v^2, so the root is bracketed by (0, sigma]
            n_iter = int(math.ceil(math.log2(self.sigma / V_TOL))) + 1
            for _ in range(n_iter):
                mid = 0.5 * (lo + hi)
                above = numpy.asarray(inv_square_mass(self.nu, uu, mid)) > inv
                lo = numpy.where(above, mid, lo)
                hi = numpy.where(above, hi, mid)
            out[active] = 0.5 * (lo + hi)
        return _out(out)

    def big_h(self, z):
        """``H(z) = z + sigma^2 g_nu(z)``."""
        g = stieltjes(self.nu, z)
        return _out(numpy.asarray(z) + self.sigma ** 2 * numpy.asarray(g))

    def big_h_deriv(self, u):
        """``H'(u) = 1 - sigma^2 int dnu/(u-x)^2`` for real ``u`` off the support."""
        u = numpy.asarray(u, dtype=float)
        if numpy.any(self.nu.contains(u)):
            raise DomainError('H is not differentiable on the support of nu')
        return _out(1.0 - self.sigma ** 2
                    * numpy.asarray(inv_square_mass(self.nu, u, 0.0)))

    def _psi_v(self, u):
        u = numpy.asarray(u, dtype=float)
        v = numpy.asarray(self.v_at(u))
        return u + self.sigma ** 2 * numpy.asarray(real_kernel(self.nu, u, v)), v

    def psi(self, u):
        """``Psi(u) = u + sigma^2 int (u-x) dnu / ((u-x)^2 + v(u)^2)``."""
        return _out(self._psi_v(u)[0])

    def free_support(self):
        """Support intervals ``[Psi(s_l), Psi(t_l)]``, ascending."""
        return [tuple(c) for c in self.support]

    def _component_of(self, x):
        # index of the support interval holding x, or -1
        x = numpy.asarray(x, dtype=float)
        idx = numpy.full(x.shape, -1)
        for l, (lo, hi) in enumerate(self.support):
            idx[(x >= lo) & (x <= hi)] = l
        return idx

    def psi_inverse(self, x, component):
        """Solve ``Psi(u) = x`` on one component of the closure of ``U``."""
        x = numpy.asarray(x, dtype=float)
        s, t = self.u_components[component]
        lo = numpy.full(x.shape, s)
        hi = numpy.full(x.shape, t)
        n_iter = int(math.ceil(math.log2(max(t - s, U_TOL) / U_TOL))) + 1
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            below = self._psi_v(mid)[0] < x
            lo = numpy.where(below, mid, lo)
            hi = numpy.where(below, hi, mid)
        return _out(0.5 * (lo + hi))

    # distribution of the free convolution

    def free_density(self, x):
        """Density ``v(Psi^{-1}(x)) / (pi sigma^2)``; zero off the support."""
        x = numpy.asarray(x, dtype=float)
        out = numpy.zeros(x.shape)
        comp = self._component_of(x)
        for l in range(len(self.support)):
            mask = comp == l
            if numpy.any(mask):
                u = numpy.asarray(self.psi_inverse(x[mask], l))
                out[mask] = numpy.asarray(self.v_at(u)) / (math.pi * self.sigma ** 2)
        return _out(out)

    def _cdf_at(self, u, v):
        # 1 - Im[L_nu(w) + sigma^2 g_nu(w)^2 / 2] / pi at w = u + iv, where
        # L_nu is the log potential; both sides have derivative g in z.
        re_g = numpy.asarray(real_kernel(self.nu, u, v))
        with numpy.errstate(invalid='ignore'):
            im_g = numpy.where(v > 0, -v * numpy.asarray(
                inv_square_mass(self.nu, u, v)), 0.0)
        im_l = numpy.asarray(log_potential_imag(self.nu, u, v))
        val = 1.0 - (im_l + self.sigma ** 2 * re_g * im_g) / math.pi
        return numpy.clip(val, 0.0, 1.0)

    def free_cdf(self, x):
        """
        Distribution function of ``mu_sigma [+] nu``.

        On a support interval the value follows in closed form from the log
        potential at ``Psi^{-1}(x) + i v``; off the support it is the
        cumulative component mass.
        """
        x0 = numpy.asarray(x, dtype=float)
        x = numpy.atleast_1d(x0)
        comp = self._component_of(x)
        lefts = numpy.array([lo for lo, _ in self.support])
        # mass of all components lying entirely left of x
        n_left = numpy.searchsorted(lefts, x, side='right')
        out = numpy.asarray(self._cum)[n_left].astype(float)
        for l in range(len(self.support)):
            mask = comp == l
            if numpy.any(mask):
                u = numpy.asarray(self.psi_inverse(x[mask], l))
                v = numpy.asarray(self.v_at(u))
                out[mask] = self._cdf_at(u, v)
        return _out(numpy.clip(out, 0.0, 1.0).reshape(x0.shape))

    def free_cdf_quadrature(self, x, tol=1e-9):
        """
        Distribution function by adaptive Simpson integration of
        :meth:`free_density`, with whole-component masses taken from ``nu``.

        Slow; kept as an independent check of :meth:`free_cdf`. The
        substitution ``x = c - r cos(phi)`` removes the square-root edges.
        """
        x = float(x)
        l = int(self._component_of(x))
        if l < 0:
            return float(self.free_cdf(x))
        lo, hi = self.support[l]
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        phi_x = math.acos(min(1.0, max(-1.0, (c - x) / r)))

        def integrand(phi):
            return float(self.free_density(c - r * math.cos(phi))) * r * math.sin(phi)

        part = adaptive_simpson(integrand, 0.0, phi_x, tol=tol)
        return float(self._cum[l] + part)

    def free_quantile(self, alpha):
        """Generalized inverse ``inf{x : free_cdf(x) >= alpha}``; ``alpha = 0``
        maps to the left end of the support."""
        alpha = numpy.asarray(alpha, dtype=float)
        if numpy.any(~((alpha >= 0) & (alpha <= 1))):
            raise RangeError('quantile level must lie in [0, 1]')
        cum = numpy.asarray(self._cum[1:])
        comp = numpy.minimum(numpy.searchsorted(cum, alpha, side='left'),
                             len(cum) - 1)
        s = numpy.array([c[0] for c in self.u_components])[comp]
        t = numpy.array([c[1] for c in self.u_components])[comp]
        lo, hi = s.astype(float), t.astype(float)
        n_iter = int(math.ceil(math.log2(max(numpy.max(t - s), U_TOL) / 1e-13))) + 1
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            reached = self._cdf_at(mid, numpy.asarray(self.v_at(mid))) >= alpha
            hi = numpy.where(reached, mid, hi)
            lo = numpy.where(reached, lo, mid)
        # alpha == 0 sits at the left boundary of the first component
        hi = numpy.where(alpha == 0, s, hi)
        return _out(self._psi_v(hi)[0])

    # independent routes

    def fixed_point_g(self, z, damping=0.5, tol=1e-13, max_iter=100_000):
        """
        Stieltjes transform of ``mu_sigma [+] nu`` from the fixed-point
        equation ``g = g_nu(z - sigma^2 g)``, started at ``g = 1/z``.

        The update is ``g <- g + damping * (g_nu(z - sigma^2 g) - g)``; the
        undamped map is nearly an isometry with rotation close to the real
        axis, which the averaging removes.
        """
        z = numpy.asarray(z, dtype=complex)
        if numpy.any(z.imag <= 0):
            raise DomainError('fixed_point_g needs Im z > 0')
        flat = z.ravel()
        g = 1.0 / flat
        active = numpy.arange(flat.size)
        s2 = self.sigma ** 2
        residual = numpy.zeros(flat.size)
        for _ in range(max_iter):
            if active.size == 0:
                break
            zz, gg = flat[active], g[active]
            t = numpy.asarray(stieltjes(self.nu, zz - s2 * gg))
            step = t - gg
            res = numpy.abs(step)
            done = res <= tol
            g[active] = numpy.where(done, t, gg + damping * step)
            residual[active] = res
            active = active[~done]
        if active.size:
            raise ConvergenceError(
                f'fixed-point iteration for g did not converge in {max_iter} '
                f'iterations (residual {residual[active].max():.3g})',
                residual=float(residual[active].max()))
        return _out(g.reshape(z.shape))

    def f_inverse(self, x):
        """
        Subordination function on the real complement of the support: the
        unique ``u`` off the closure of ``U`` with ``H(u) = x``.
        """
        x = numpy.asarray(x, dtype=float)
        if numpy.any(self._component_of(x) >= 0):
            raise DomainError('f_inverse is only defined off the support')
        comps = self.u_components
        lefts = numpy.array([lo for lo, _ in self.support])
        k = numpy.searchsorted(lefts, x, side='right')
        # gap k lies between component k-1 and component k
        lo = numpy.where(k == 0, x, numpy.array([0.0] + [c[1] for c in comps])[k])
        hi = numpy.where(k == len(comps), x,
                         numpy.array([c[0] for c in comps] + [0.0])[k])
        lo, hi = lo.astype(float), hi.astype(float)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if numpy.all((mid == lo) | (mid == hi)):
                break
            below = numpy.asarray(self.big_h(mid)) < x
            lo = numpy.where(below, mid, lo)
            hi = numpy.where(below, hi, mid)
        hl = numpy.abs(numpy.asarray(self.big_h(lo)) - x)
        hh = numpy.abs(numpy.asarray(self.big_h(hi)) - x)
        return _out(numpy.where(hl <= hh, lo, hi))

    def to_dict(self):
        return {
            'sigma': self.sigma,
            'u_components': [list(c) for c in self.u_components],
            'support': [list(c) for c in self.support],
            'masses': list(self.component_masses),
        }
